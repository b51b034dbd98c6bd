//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Expected values come from oracles written here, independently of the
//! library: a separate splitmix64 chain, integer vernier geometry and
//! hand-rolled decimal formatting.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use vmlab_core::geometry::alignment_distances;
use vmlab_core::{
    best_aligned_mark, coincidence_index, compose, decompose, default_spec, format_value, grade,
    reading_text, Exercise, ExerciseStream, GradeOptions, InstrumentKind, InstrumentSpec, Rational,
    TickPosition, Verdict, MSG_CORRECT, MSG_INCORRECT,
};
use vmlab_service::Lab;

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn vmlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vmlab"))
}

// ---------------------------------------------------------------- oracles

/// splitmix64 written out from its published definition.
struct Splitmix(u64);

impl Splitmix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let z = self.0;
        let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in 1..=n. Rejects the top `2^64 mod n` values.
    fn one_to(&mut self, n: u64) -> u64 {
        let excess = (u64::MAX % n + 1) % n;
        loop {
            let z = self.next();
            if excess == 0 || z < 0u64.wrapping_sub(excess) {
                return 1 + z % n;
            }
        }
    }
}

/// Exercise targets for one kind in one session.
fn oracle_targets(seed: u64, max: u64, count: usize) -> Vec<u64> {
    let mut g = Splitmix(seed);
    let mut out: Vec<u64> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut t = g.one_to(max);
        if out.last() == Some(&t) {
            t = g.one_to(max);
        }
        out.push(t);
    }
    out
}

/// Display string of a default instrument at `t` ticks.
fn oracle_display(kind: InstrumentKind, t: u64) -> String {
    match kind {
        InstrumentKind::VernierCaliper | InstrumentKind::VernierProtractor => format!("{}.{}", t / 10, t % 10),
        InstrumentKind::Micrometer => format!("{}.{:02}", t / 100, t % 100),
        InstrumentKind::DialIndicator => (t * 10).to_string(),
    }
}

/// Vernier geometry in units of (main division)/N: fixed marks at every
/// multiple of N, vernier mark j at t + j(N-1). Returns each mark's
/// distance to its nearest fixed mark.
fn oracle_vernier_distances(t: u64, n: u64) -> Vec<u64> {
    (0..=n)
        .map(|j| {
            let r = (t + j * (n - 1)) % n;
            r.min(n - r)
        })
        .collect()
}

// ------------------------------------------------------------- criteria

fn exhaustive_round_trip() -> Outcome {
    let start = Instant::now();
    let mut total = 0u64;
    for kind in InstrumentKind::ALL {
        let spec = default_spec(kind);
        for pos in spec.positions() {
            let back = decompose(&spec, pos).and_then(|r| compose(&spec, r));
            ensure!(back == Ok(pos), "{kind:?} at {}: got {back:?}", pos.ticks());
            total += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(total == 1501 + 2501 + 1001 + 1801, "swept {total} positions");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{total}/{total} positions in {elapsed:.1?}"))
}

fn vernier_oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for kind in [InstrumentKind::VernierCaliper, InstrumentKind::VernierProtractor] {
        let spec = default_spec(kind);
        let n = spec.vernier_divisions().expect("vernier") as u64;
        let unit = spec.main_division() / Rational::from_integer(n as i64);
        ensure!(unit == spec.least_count(), "{kind:?}: D/N differs from the least count");
        for pos in spec.positions() {
            let t = pos.ticks() as u64;
            let dist = oracle_vernier_distances(t, n);
            let best = (0..dist.len()).min_by_key(|&j| (dist[j], j)).unwrap() as u32;
            let lib_index = coincidence_index(&spec, pos).map_err(|e| e.to_string())?;
            let lib_geom = best_aligned_mark(&spec, pos).map_err(|e| e.to_string())?;
            ensure!(
                lib_index == best && lib_geom == best,
                "{kind:?} at {t}: oracle {best}, coincidence_index {lib_index}, best_aligned_mark {lib_geom}"
            );
            let lib_dist = alignment_distances(&spec, pos).map_err(|e| e.to_string())?;
            let expect: Vec<Rational> = dist.iter().map(|&d| unit * Rational::from_integer(d as i64)).collect();
            ensure!(lib_dist == expect, "{kind:?} at {t}: distances {lib_dist:?} vs {expect:?}");
            let distinct: BTreeSet<Rational> = lib_dist.into_iter().collect();
            let mut it = distinct.into_iter();
            ensure!(
                it.next() == Some(Rational::from_integer(0)) && it.next() == Some(unit),
                "{kind:?} at {t}: second-best distance is not D/N"
            );
            checked += 1;
        }
    }
    ensure!(checked == 1501 + 1801, "checked {checked}");
    Ok(format!("{checked}/{checked} vernier positions, second-best gap = D/N everywhere"))
}

fn reference_readings() -> Outcome {
    let dial = default_spec(InstrumentKind::DialIndicator);
    let prot = default_spec(InstrumentKind::VernierProtractor);
    let d = format_value(&dial, TickPosition(35)).map_err(|e| e.to_string())?;
    let p = format_value(&prot, TickPosition(160)).map_err(|e| e.to_string())?;
    ensure!(d == "350", "dial 35 displays {d:?}");
    ensure!(p == "16.0", "protractor 160 displays {p:?}");
    let text = reading_text(&prot, TickPosition(160)).map_err(|e| e.to_string())?;
    ensure!(text.ends_with("= 16.0 °"), "{text}");
    let out = vmlab()
        .args(["render", "--instrument", "dial", "--ticks", "35", "--show-reading"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success() && String::from_utf8_lossy(&out.stdout).contains("350 μm"),
        "render output lacks \"350 μm\""
    );
    Ok("dial 35 → \"350\" μm, protractor 160 → \"16.0\" °".into())
}

fn grade_text(spec: &InstrumentSpec, target: TickPosition, answer: &str) -> Result<(Verdict, String), String> {
    let mut ex = Exercise::new("x", spec.kind(), target, 0);
    let r = grade(spec, &mut ex, answer, GradeOptions::default()).map_err(|e| e.to_string())?;
    Ok((r.verdict, r.message))
}

fn feedback_protocol() -> Outcome {
    ensure!(MSG_CORRECT.as_bytes() == b"Well done", "correct message {MSG_CORRECT:?}");
    ensure!(MSG_INCORRECT.as_bytes() == b"Sorry, wrong answer!", "incorrect message {MSG_INCORRECT:?}");
    let mut graded = 0;
    for kind in InstrumentKind::ALL {
        let spec = default_spec(kind);
        let max = spec.range_max_ticks() as u64;
        for t in 1..=max {
            let target = TickPosition(t as u32);
            let (v, m) = grade_text(&spec, target, &oracle_display(kind, t))?;
            ensure!(v == Verdict::Correct && m == "Well done", "{kind:?} {t}: true value graded {v:?}");
            for nb in [t - 1, t + 1] {
                if nb > max {
                    continue;
                }
                let (v, m) = grade_text(&spec, target, &oracle_display(kind, nb))?;
                ensure!(
                    v == Verdict::Incorrect && m == "Sorry, wrong answer!",
                    "{kind:?} {t}: neighbour {nb} graded {v:?}"
                );
            }
            graded += 1;
        }
    }
    Ok(format!("{graded} targets correct, all ±1-tick neighbours incorrect"))
}

fn generator_determinism() -> Outcome {
    let seed = 7u64;
    let kind = InstrumentKind::VernierCaliper;
    let spec = default_spec(kind);
    let gen = || {
        vmlab()
            .args(["gen", "--instrument", "caliper", "--count", "1000", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (gen()?, gen()?);
    ensure!(a.status.success(), "gen failed: {}", String::from_utf8_lossy(&a.stderr));
    ensure!(a.stdout == b.stdout, "two gen runs differ");
    let cli: Vec<u64> = String::from_utf8_lossy(&a.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let oracle = oracle_targets(seed, 1500, 1000);
    ensure!(cli == oracle, "CLI stream differs from the reference chain");

    let mut lab = Lab::ephemeral(seed);
    let sid = lab.create_session().map_err(|e| e.message)?;
    let service: Vec<u64> = (0..1000)
        .map(|_| {
            let ex = lab.issue_exercise(&sid, kind).unwrap();
            lab.target_of(&ex.exercise_id).unwrap().ticks() as u64
        })
        .collect();
    ensure!(service == cli, "service stream differs from CLI stream");

    let mut stream = ExerciseStream::new(20_240_601);
    let mut bins = [0u64; 10];
    for _ in 0..10_000 {
        let t = stream.next_exercise(&spec).target().ticks() as usize;
        bins[(t - 1) * 10 / 1500] += 1;
    }
    let chi2: f64 = bins.iter().map(|&o| (o as f64 - 1000.0).powi(2) / 1000.0).sum();
    ensure!(chi2 < 33.0, "chi-square {chi2:.2} over {bins:?}");
    Ok(format!("1000-exercise streams identical (2 CLI runs, service, reference); chi-square {chi2:.2} < 33.0"))
}

struct Server {
    child: Child,
    base: String,
}

impl Server {
    fn start(dir: &Path, seed: u64) -> Result<Server, String> {
        let mut child = vmlab()
            .args(["serve", "--port", "0", "--seed", &seed.to_string(), "--data-dir"])
            .arg(dir)
            .env("RUST_LOG", "warn")
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| e.to_string())?;
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .map_err(|e| e.to_string())?;
        let base = line
            .trim()
            .strip_prefix("listening on ")
            .ok_or_else(|| format!("unexpected serve output {line:?}"))?
            .to_owned();
        Ok(Server { child, base })
    }

    fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

struct Client {
    http: reqwest::blocking::Client,
    base: String,
    /// Every response body seen while an exercise is open.
    seen: Vec<String>,
}

impl Client {
    fn send(&mut self, method: reqwest::Method, path: &str, body: Option<Value>) -> Result<(u16, Value), String> {
        let mut req = self.http.request(method, format!("{}/api/v1{path}", self.base));
        if let Some(b) = body {
            req = req.json(&b);
        }
        let resp = req.send().map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let text = resp.text().map_err(|e| e.to_string())?;
        self.seen.push(text.clone());
        let value = serde_json::from_str(&text).map_err(|e| format!("{e}: {text}"))?;
        Ok((status, value))
    }

    fn get(&mut self, path: &str) -> Result<(u16, Value), String> {
        self.send(reqwest::Method::GET, path, None)
    }

    fn post(&mut self, path: &str, body: Value) -> Result<(u16, Value), String> {
        self.send(reqwest::Method::POST, path, Some(body))
    }
}

fn service_contract(dir: &Path) -> Outcome {
    let seed = 424_242u64;
    let kind = InstrumentKind::VernierCaliper;
    let targets = oracle_targets(seed, 1500, 3);
    let server = Server::start(dir, seed)?;
    let mut c = Client {
        http: reqwest::blocking::Client::new(),
        base: server.base.clone(),
        seen: Vec::new(),
    };

    let (st, v) = c.post("/sessions", json!({}))?;
    ensure!(st == 201, "create session: {st}");
    let sid = v["session_id"].as_str().unwrap_or_default().to_owned();
    c.seen.clear();

    let (st, v) = c.post(&format!("/sessions/{sid}/exercises"), json!({"kind": "caliper"}))?;
    ensure!(st == 201, "issue: {st} {v}");
    let e1 = v["exercise_id"].as_str().unwrap_or_default().to_owned();
    c.get(&format!("/sessions/{sid}/exercises/{e1}"))?;
    let first = oracle_display(kind, targets[0]);
    ensure!(
        c.seen.iter().all(|b| !b.contains(&first)),
        "a response for open exercise {e1} contains {first:?}"
    );

    let (st, v) = c.post(&format!("/sessions/{sid}/exercises/{e1}/answer"), json!({"text": first}))?;
    ensure!(st == 200 && v["message"] == "Well done", "answer {first:?}: {st} {v}");
    let (_, stats) = c.get(&format!("/sessions/{sid}/stats"))?;
    ensure!(
        stats["overall"]["attempts"] == 1 && stats["overall"]["correct"] == 1,
        "stats after one correct answer: {stats}"
    );

    // A second exercise stays open across the restart.
    c.seen.clear();
    let (_, v) = c.post(&format!("/sessions/{sid}/exercises"), json!({"kind": "caliper"}))?;
    let e2 = v["exercise_id"].as_str().unwrap_or_default().to_owned();
    c.get(&format!("/sessions/{sid}/exercises/{e2}"))?;
    c.get(&format!("/sessions/{sid}/stats"))?;

    server.kill();
    let server = Server::start(dir, seed)?;
    c.base = server.base.clone();

    let (_, after) = c.get(&format!("/sessions/{sid}/stats"))?;
    ensure!(after == stats, "stats changed across restart: {stats} -> {after}");
    let (st, v) = c.post(&format!("/sessions/{sid}/exercises/{e1}/answer"), json!({"text": first}))?;
    ensure!(st == 409 && v["code"] == "already_answered", "duplicate submit: {st} {v}");
    c.get(&format!("/sessions/{sid}/exercises/{e2}"))?;
    let second = oracle_display(kind, targets[1]);
    ensure!(
        c.seen.iter().all(|b| !b.contains(&second)),
        "a response for open exercise {e2} contains {second:?}"
    );
    let (st, v) = c.post(&format!("/sessions/{sid}/exercises/{e2}/answer"), json!({"text": second}))?;
    ensure!(st == 200 && v["message"] == "Well done", "open exercise after restart: {st} {v}");

    // The generator resumes where it stopped.
    let (_, v) = c.post(&format!("/sessions/{sid}/exercises"), json!({"kind": "caliper"}))?;
    let e3 = v["exercise_id"].as_str().unwrap_or_default().to_owned();
    let third = oracle_display(kind, targets[2]);
    let (_, v) = c.post(&format!("/sessions/{sid}/exercises/{e3}/answer"), json!({"text": third}))?;
    server.kill();
    ensure!(v["message"] == "Well done", "third exercise: {v}");
    Ok("flow 1/1, stats identical after kill + restart, duplicate → 409, no leaks".into())
}

fn cli_contract(dir: &Path) -> Outcome {
    let start = Instant::now();
    let out = vmlab().arg("selftest").output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let summary = String::from_utf8_lossy(&out.stdout).trim().to_owned();
    ensure!(out.status.code() == Some(0), "selftest exit {:?}: {summary}", out.status.code());
    ensure!(
        summary.starts_with("roundtrip 6804/6804 ok, coincidence 3302/3302 ok"),
        "selftest said {summary:?}"
    );
    ensure!(elapsed < Duration::from_secs(1), "selftest took {elapsed:?}");
    let faulty = vmlab()
        .args(["selftest", "--inject-fault", "roundtrip"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(faulty.status.code() == Some(1), "fault-injected selftest exit {:?}", faulty.status.code());

    let gen_file = |name: &str| -> Result<Vec<u8>, String> {
        let path: PathBuf = dir.join(name);
        let st = vmlab()
            .args(["gen", "--instrument", "micrometer", "--count", "50", "--seed", "7", "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(st.success(), "gen exit {st}");
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    ensure!(gen_file("a.csv")? == gen_file("b.csv")?, "gen output differs between runs");

    for format in ["svg", "geometry"] {
        let render = || {
            vmlab()
                .args(["render", "--instrument", "protractor", "--ticks", "160", "--show-reading", "--format", format])
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (render()?, render()?);
        ensure!(a.status.success() && !a.stdout.is_empty(), "render {format} failed");
        ensure!(a.stdout == b.stdout, "render {format} differs between runs");
    }
    Ok(format!("selftest exit 0 in {} ms; gen and render byte-stable", elapsed.as_millis()))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Check> = vec![
        ("exhaustive round-trip", Box::new(exhaustive_round_trip)),
        ("vernier oracle equivalence", Box::new(vernier_oracle_equivalence)),
        ("reference readings", Box::new(reference_readings)),
        ("feedback protocol", Box::new(feedback_protocol)),
        ("generator determinism and fairness", Box::new(generator_determinism)),
        ("service contract and durability", Box::new(|| service_contract(&tmp.path().join("service")))),
        ("cli selftest, gen, render", Box::new(|| cli_contract(tmp.path()))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
