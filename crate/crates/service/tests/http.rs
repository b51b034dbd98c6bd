use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use vmlab_core::{default_spec, format_value, stats_from_log, InstrumentKind};
use vmlab_service::eventlog::{read_all, Event};
use vmlab_service::{router, AppState, Lab};

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| {
            panic!("{e}: {}", String::from_utf8_lossy(&self.body))
        })
    }
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<&str>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header(header::CONTENT_TYPE, "application/json");
    }
    let req = req.body(Body::from(body.unwrap_or("").to_owned())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, headers, body }
}

fn app_with(lab: Lab) -> (Router, AppState) {
    let state = AppState::new(lab);
    (router(state.clone()), state)
}

#[tokio::test]
async fn catalog_lists_four_instruments() {
    let (app, _) = app_with(Lab::ephemeral(1));
    let r = call(&app, Method::GET, "/api/v1/instruments", None).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    let kinds: Vec<_> = v.as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap().to_owned()).collect();
    assert_eq!(kinds, ["caliper", "micrometer", "dial", "protractor"]);
    assert_eq!(v[0]["least_count"], "0.1 mm");
    assert_eq!(v[1]["least_count"], "0.01 mm");
    assert_eq!(v[2]["least_count"], "10 μm");
    assert_eq!(v[3]["least_count"], "0.1 °");
    assert_eq!(v[1]["range_max_ticks"], 2500);
}

#[tokio::test]
async fn template_supports_conditional_get() {
    let (app, _) = app_with(Lab::ephemeral(1));
    let r = call(&app, Method::GET, "/api/v1/instruments/caliper/template", None).await;
    assert_eq!(r.status, StatusCode::OK);
    let etag = r.headers[header::ETAG].to_str().unwrap().to_owned();
    let again = call(&app, Method::GET, "/api/v1/instruments/caliper/template", None).await;
    assert_eq!(r.body, again.body, "template bytes are stable");

    let req = Request::get("/api/v1/instruments/caliper/template")
        .header(header::IF_NONE_MATCH, &etag)
        .body(Body::empty())
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::NOT_MODIFIED);

    let r = call(&app, Method::GET, "/api/v1/instruments/slide-rule/template", None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["code"], "not_found");
}

#[tokio::test]
async fn reading_endpoint_and_its_errors() {
    let (app, _) = app_with(Lab::ephemeral(1));
    let r = call(&app, Method::GET, "/api/v1/instruments/caliper/reading?ticks=123", None).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_eq!(v["display_value"], "12.3");
    assert_eq!(v["text"], "main 12 mm + vernier 3 × 0.1 mm = 12.3 mm");
    assert_eq!(v["reading"]["vernier_index"], 3);

    let r = call(&app, Method::GET, "/api/v1/instruments/dial/reading?ticks=535", None).await;
    assert_eq!(r.json()["counter_transform"]["kind"], "rotation");

    for (uri, status, code) in [
        ("/api/v1/instruments/caliper/reading?ticks=1501", 422, "out_of_range"),
        ("/api/v1/instruments/caliper/reading?ticks=-1", 422, "malformed_input"),
        ("/api/v1/instruments/caliper/reading?ticks=abc", 422, "malformed_input"),
        ("/api/v1/instruments/caliper/reading", 422, "malformed_input"),
        ("/api/v1/instruments/nope/reading?ticks=1", 404, "not_found"),
    ] {
        let r = call(&app, Method::GET, uri, None).await;
        assert_eq!(r.status.as_u16(), status, "{uri}");
        assert_eq!(r.json()["code"], code, "{uri}");
        assert_eq!(r.json()["http_status"], status, "{uri}");
        assert!(r.json()["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
}

#[tokio::test]
async fn quiz_round_trip() {
    let (app, state) = app_with(Lab::ephemeral(99));
    let r = call(&app, Method::POST, "/api/v1/sessions", None).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let sid = r.json()["session_id"].as_str().unwrap().to_owned();

    let r = call(&app, Method::POST, &format!("/api/v1/sessions/{sid}/exercises"), Some(r#"{"kind":"micrometer"}"#)).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let eid = r.json()["exercise_id"].as_str().unwrap().to_owned();
    let target = state.lab().unwrap().target_of(&eid).unwrap();
    let right = format_value(&default_spec(InstrumentKind::Micrometer), target).unwrap();

    let answer = format!("/api/v1/sessions/{sid}/exercises/{eid}/answer");
    let r = call(&app, Method::POST, &answer, Some(r#"{"text":"1,5"}"#)).await;
    assert_eq!((r.status.as_u16(), r.json()["code"].clone()), (422, json!("malformed_input")));
    let r = call(&app, Method::POST, &answer, Some("{not json")).await;
    assert_eq!((r.status.as_u16(), r.json()["code"].clone()), (422, json!("malformed_input")));

    let body = json!({ "text": right }).to_string();
    let r = call(&app, Method::POST, &answer, Some(&body)).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json(), json!({"verdict": "correct", "message": "Well done"}));
    let r = call(&app, Method::POST, &answer, Some(&body)).await;
    assert_eq!((r.status.as_u16(), r.json()["code"].clone()), (409, json!("already_answered")));

    let r = call(&app, Method::POST, &format!("/api/v1/sessions/{sid}/exercises"), Some(r#"{"kind":"dial"}"#)).await;
    let eid2 = r.json()["exercise_id"].as_str().unwrap().to_owned();
    let r = call(
        &app,
        Method::POST,
        &format!("/api/v1/sessions/{sid}/exercises/{eid2}/answer"),
        Some(r#"{"text":"999999"}"#),
    )
    .await;
    assert_eq!(r.json(), json!({"verdict": "incorrect", "message": "Sorry, wrong answer!"}));

    let stats = call(&app, Method::GET, &format!("/api/v1/sessions/{sid}/stats"), None).await.json();
    assert_eq!(stats["overall"]["attempts"], 2);
    assert_eq!(stats["overall"]["correct"], 1);
    assert_eq!(stats["per_kind"]["micrometer"]["correct"], 1);
    assert_eq!(stats["per_kind"]["dial"]["attempts"], 1);

    let r = call(&app, Method::GET, "/api/v1/sessions/unknown/stats", None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::POST, "/api/v1/sessions/unknown/exercises", Some(r#"{"kind":"dial"}"#)).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::POST, &format!("/api/v1/sessions/{sid}/exercises"), Some(r#"{"kind":"ruler"}"#)).await;
    assert_eq!(r.status.as_u16(), 422);
}

#[tokio::test]
async fn quiz_responses_never_contain_the_reading() {
    let (app, state) = app_with(Lab::ephemeral(5));
    let sid = call(&app, Method::POST, "/api/v1/sessions", None).await.json()["session_id"]
        .as_str()
        .unwrap()
        .to_owned();
    for kind in InstrumentKind::ALL {
        for _ in 0..25 {
            let issue = call(
                &app,
                Method::POST,
                &format!("/api/v1/sessions/{sid}/exercises"),
                Some(&json!({ "kind": kind.slug() }).to_string()),
            )
            .await;
            let eid = issue.json()["exercise_id"].as_str().unwrap().to_owned();
            let view = call(&app, Method::GET, &format!("/api/v1/sessions/{sid}/exercises/{eid}"), None).await;
            assert_eq!(view.status, StatusCode::OK);
            let target = state.lab().unwrap().target_of(&eid).unwrap();
            let shown = format_value(&default_spec(kind), target).unwrap();
            for body in [&issue.body, &view.body] {
                let text = String::from_utf8_lossy(body);
                assert!(!text.contains(&shown), "{kind:?} response leaks {shown}: {text}");
                assert!(!text.contains("target"), "{text}");
            }
        }
    }
}

#[tokio::test]
async fn reads_do_not_write_events() {
    let dir = tempfile::tempdir().unwrap();
    let (app, state) = app_with(Lab::open(dir.path(), Some(3)).unwrap());
    let sid = call(&app, Method::POST, "/api/v1/sessions", None).await.json()["session_id"]
        .as_str()
        .unwrap()
        .to_owned();
    let before = state.lab().unwrap().event_count();
    for uri in [
        "/api/v1/instruments".to_owned(),
        "/api/v1/instruments/dial/template".to_owned(),
        "/api/v1/instruments/dial/reading?ticks=5".to_owned(),
        format!("/api/v1/sessions/{sid}/stats"),
        "/".to_owned(),
        "/lab/protractor".to_owned(),
    ] {
        for _ in 0..3 {
            assert_eq!(call(&app, Method::GET, &uri, None).await.status, StatusCode::OK, "{uri}");
        }
    }
    assert_eq!(state.lab().unwrap().event_count(), before);
}

#[tokio::test]
async fn pages_and_assets_are_served() {
    let (app, _) = app_with(Lab::ephemeral(1));
    for (uri, needle) in [
        ("/", "Main Menu"),
        ("/safety", "Electrical safety"),
        ("/lab/caliper", "data-kind=\"caliper\""),
        ("/lab/dial-indicator", "data-kind=\"dial\""),
        ("/assets/lab.js", "vmlabMirror"),
        ("/assets/lab.css", ".stage"),
    ] {
        let r = call(&app, Method::GET, uri, None).await;
        assert_eq!(r.status, StatusCode::OK, "{uri}");
        assert!(String::from_utf8_lossy(&r.body).contains(needle), "{uri}");
    }
    assert_eq!(call(&app, Method::GET, "/lab/ruler", None).await.status, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, Method::GET, "/api/v1/nothing", None).await.json()["code"], "not_found");
}

#[tokio::test]
async fn restart_restores_sessions_and_generator() {
    let dir = tempfile::tempdir().unwrap();
    let (sid, open_eid, stats_before, next_state) = {
        let (app, state) = app_with(Lab::open(dir.path(), Some(11)).unwrap());
        let sid = call(&app, Method::POST, "/api/v1/sessions", None).await.json()["session_id"]
            .as_str()
            .unwrap()
            .to_owned();
        let issue = |kind: &'static str| {
            let app = app.clone();
            let sid = sid.clone();
            async move {
                call(&app, Method::POST, &format!("/api/v1/sessions/{sid}/exercises"), Some(&json!({ "kind": kind }).to_string()))
                    .await
                    .json()["exercise_id"]
                    .as_str()
                    .unwrap()
                    .to_owned()
            }
        };
        let answered = issue("caliper").await;
        call(
            &app,
            Method::POST,
            &format!("/api/v1/sessions/{sid}/exercises/{answered}/answer"),
            Some(r#"{"text":"0.1"}"#),
        )
        .await;
        let open_eid = issue("protractor").await;
        let stats = call(&app, Method::GET, &format!("/api/v1/sessions/{sid}/stats"), None).await.json();
        let next_state = state.lab().unwrap().generator_state();
        (sid, open_eid, stats, next_state)
    };

    // A different seed on restart does not override the logged one.
    let lab = Lab::open(dir.path(), Some(12)).unwrap();
    assert_eq!(lab.seed(), 11);
    assert_eq!(lab.generator_state(), next_state);
    let (app, _) = app_with(lab);
    let stats = call(&app, Method::GET, &format!("/api/v1/sessions/{sid}/stats"), None).await.json();
    assert_eq!(stats, stats_before);
    let view = call(&app, Method::GET, &format!("/api/v1/sessions/{sid}/exercises/{open_eid}"), None).await;
    assert_eq!(view.json()["state"], "open");

    // Stats recomputed straight from the log agree with the service.
    let attempts: Vec<_> = read_all(dir.path())
        .unwrap()
        .into_iter()
        .filter(|r| r.session_id.as_deref() == Some(sid.as_str()))
        .filter_map(|r| match r.event {
            Event::AttemptGraded(a) => Some(a),
            _ => None,
        })
        .collect();
    assert_eq!(serde_json::to_value(stats_from_log(&attempts)).unwrap(), stats);
}
