//! HTTP routes. All JSON endpoints live under `/api/v1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::header::{CACHE_CONTROL, CONTENT_TYPE, ETAG, IF_NONE_MATCH};
use axum::http::{HeaderMap, StatusCode, Uri};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vmlab_core::{
    decompose, default_spec, format_value, geometry_template, moving_transform, reading_text,
    revolution_transform, InstrumentKind, MovingTransform, Reading, SessionStats,
};

use crate::error::ApiError;
use crate::lab::{ExerciseView, IssuedExercise, Lab, Revealed};
use crate::pages::{self, LinkStyle};

/// Serialized geometry templates, computed once per process.
#[derive(Debug)]
pub struct Templates {
    docs: HashMap<InstrumentKind, (Vec<u8>, String)>,
}

impl Templates {
    pub fn build() -> Self {
        let docs = InstrumentKind::ALL
            .iter()
            .map(|k| {
                let body = template_json(*k);
                let digest = Sha256::digest(&body);
                let etag = format!("\"{}\"", hex::encode(&digest[..16]));
                (*k, (body, etag))
            })
            .collect();
        Templates { docs }
    }

    pub fn get(&self, kind: InstrumentKind) -> (&[u8], &str) {
        let (body, etag) = &self.docs[&kind];
        (body, etag)
    }
}

/// The template document for `kind`, byte-identical on every call.
pub fn template_json(kind: InstrumentKind) -> Vec<u8> {
    serde_json::to_vec(&geometry_template(&default_spec(kind))).expect("geometry serializes")
}

#[derive(Clone)]
pub struct AppState {
    lab: Arc<Mutex<Lab>>,
    templates: Arc<Templates>,
}

impl AppState {
    pub fn new(lab: Lab) -> Self {
        AppState {
            lab: Arc::new(Mutex::new(lab)),
            templates: Arc::new(Templates::build()),
        }
    }

    /// All mutations go through this lock, so there is a single writer.
    pub fn lab(&self) -> Result<MutexGuard<'_, Lab>, ApiError> {
        self.lab
            .lock()
            .map_err(|_| ApiError::internal("lab state is unavailable"))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/sessions", post(create_session))
        .route("/api/v1/instruments", get(list_instruments))
        .route("/api/v1/instruments/{kind}/template", get(get_template))
        .route("/api/v1/instruments/{kind}/reading", get(get_reading))
        .route("/api/v1/sessions/{sid}/exercises", post(issue_exercise))
        .route("/api/v1/sessions/{sid}/exercises/{eid}", get(get_exercise))
        .route("/api/v1/sessions/{sid}/exercises/{eid}/answer", post(submit_answer))
        .route("/api/v1/sessions/{sid}/exercises/{eid}/reveal", post(reveal_exercise))
        .route("/api/v1/sessions/{sid}/stats", get(get_stats))
        .route("/", get(|| async { Html(pages::home_page(LinkStyle::Served)) }))
        .route("/safety", get(|| async { Html(pages::safety_page(LinkStyle::Served)) }))
        .route("/lab/{kind}", get(lab_page))
        .route("/assets/lab.js", get(|| async { asset("text/javascript; charset=utf-8", pages::LAB_JS) }))
        .route("/assets/lab.css", get(|| async { asset("text/css; charset=utf-8", pages::LAB_CSS) }))
        .fallback(not_found)
        .with_state(state)
}

fn asset(content_type: &'static str, body: &'static str) -> Response {
    ([(CONTENT_TYPE, content_type)], body).into_response()
}

async fn not_found(uri: Uri) -> Response {
    if uri.path().starts_with("/api/") {
        ApiError::not_found(format!("no endpoint {}", uri.path())).into_response()
    } else {
        (StatusCode::NOT_FOUND, Html("<!DOCTYPE html><title>Not found</title><h1>Not found</h1>\n")).into_response()
    }
}

fn parse_kind(kind: &str) -> Result<InstrumentKind, ApiError> {
    kind.parse()
        .map_err(|_| ApiError::not_found(format!("unknown instrument {kind:?}")))
}

async fn lab_page(Path(kind): Path<String>) -> Response {
    match kind.parse::<InstrumentKind>() {
        Ok(k) => Html(pages::lab_page(k, LinkStyle::Served)).into_response(),
        Err(_) => not_found(Uri::from_static("/lab")).await,
    }
}

#[derive(Serialize)]
struct SessionCreated {
    session_id: String,
}

async fn create_session(State(state): State<AppState>) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let session_id = state.lab()?.create_session()?;
    Ok((StatusCode::CREATED, Json(SessionCreated { session_id })))
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogEntry {
    pub kind: InstrumentKind,
    pub display_name: String,
    pub least_count: String,
    pub display_unit: String,
    pub range_max_ticks: u32,
}

pub fn catalog() -> Vec<CatalogEntry> {
    InstrumentKind::ALL
        .iter()
        .map(|k| {
            let spec = default_spec(*k);
            let unit = spec.display_unit().symbol();
            let lc = vmlab_core::format::trimmed_decimal(spec.least_count_display()).expect("terminating");
            CatalogEntry {
                kind: *k,
                display_name: k.display_name().to_owned(),
                least_count: format!("{lc} {unit}"),
                display_unit: unit.to_owned(),
                range_max_ticks: spec.range_max_ticks(),
            }
        })
        .collect()
}

async fn list_instruments() -> Json<Vec<CatalogEntry>> {
    Json(catalog())
}

async fn get_template(
    State(state): State<AppState>,
    Path(kind): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let kind = parse_kind(&kind)?;
    let (body, etag) = state.templates.get(kind);
    let cache = [(ETAG, etag.to_owned()), (CACHE_CONTROL, "public, max-age=3600".to_owned())];
    let matches = headers
        .get(IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == etag || t.trim() == "*"));
    if matches {
        return Ok((StatusCode::NOT_MODIFIED, cache).into_response());
    }
    Ok((cache, [(CONTENT_TYPE, "application/json".to_owned())], body.to_vec()).into_response())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReadingDoc {
    pub kind: InstrumentKind,
    pub ticks: u32,
    pub reading: Reading,
    pub text: String,
    pub display_value: String,
    pub transform: MovingTransform,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counter_transform: Option<MovingTransform>,
}

async fn get_reading(
    Path(kind): Path<String>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Json<ReadingDoc>, ApiError> {
    let kind = parse_kind(&kind)?;
    let Query(query) = query.map_err(|e| ApiError::malformed(e.body_text()))?;
    let raw = query
        .get("ticks")
        .ok_or_else(|| ApiError::malformed("missing ticks query parameter"))?;
    let ticks: u64 = raw
        .parse()
        .map_err(|_| ApiError::malformed(format!("ticks must be a non-negative integer, got {raw:?}")))?;
    let spec = default_spec(kind);
    let pos = spec.position(ticks)?;
    Ok(Json(ReadingDoc {
        kind,
        ticks: pos.ticks(),
        reading: decompose(&spec, pos)?,
        text: reading_text(&spec, pos)?,
        display_value: format_value(&spec, pos)?,
        transform: moving_transform(&spec, pos)?,
        counter_transform: revolution_transform(&spec, pos)?,
    }))
}

#[derive(Deserialize)]
struct IssueBody {
    kind: String,
}

async fn issue_exercise(
    State(state): State<AppState>,
    Path(sid): Path<String>,
    body: Result<Json<IssueBody>, JsonRejection>,
) -> Result<(StatusCode, Json<IssuedExercise>), ApiError> {
    let Json(body) = body.map_err(|e| ApiError::malformed(e.body_text()))?;
    let mut lab = state.lab()?;
    // Unknown session wins over a bad body kind.
    lab.stats(&sid)?;
    let kind = body
        .kind
        .parse()
        .map_err(|e: vmlab_core::model::UnknownInstrument| ApiError::malformed(e.to_string()))?;
    Ok((StatusCode::CREATED, Json(lab.issue_exercise(&sid, kind)?)))
}

async fn get_exercise(
    State(state): State<AppState>,
    Path((sid, eid)): Path<(String, String)>,
) -> Result<Json<ExerciseView>, ApiError> {
    Ok(Json(state.lab()?.exercise_view(&sid, &eid)?))
}

#[derive(Deserialize)]
struct AnswerBody {
    text: String,
}

#[derive(Serialize)]
struct GradeDoc {
    verdict: vmlab_core::Verdict,
    message: String,
}

async fn submit_answer(
    State(state): State<AppState>,
    Path((sid, eid)): Path<(String, String)>,
    body: Result<Json<AnswerBody>, JsonRejection>,
) -> Result<Json<GradeDoc>, ApiError> {
    let mut lab = state.lab()?;
    lab.exercise_view(&sid, &eid)?;
    let Json(body) = body.map_err(|e| ApiError::malformed(e.body_text()))?;
    let result = lab.submit_answer(&sid, &eid, &body.text)?;
    Ok(Json(GradeDoc {
        verdict: result.verdict,
        message: result.message,
    }))
}

async fn reveal_exercise(
    State(state): State<AppState>,
    Path((sid, eid)): Path<(String, String)>,
) -> Result<Json<Revealed>, ApiError> {
    Ok(Json(state.lab()?.reveal_exercise(&sid, &eid)?))
}

async fn get_stats(State(state): State<AppState>, Path(sid): Path<String>) -> Result<Json<SessionStats>, ApiError> {
    Ok(Json(state.lab()?.stats(&sid)?))
}
