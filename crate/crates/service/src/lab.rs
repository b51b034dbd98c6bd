//! Lab state: sessions, exercises and the server generator, rebuilt from
//! the event log at startup.
//!
//! Every mutation is written to the log first and then applied through the
//! same [`Lab::apply`] path that replay uses, so a restarted server holds
//! exactly the state it had before.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use chrono::Utc;
use rand::Rng;
use serde::Serialize;
use vmlab_core::{
    default_spec, draw_target, format_value, grade, moving_transform, reveal, revolution_transform,
    session_stats, AttemptRecord, Exercise, ExerciseState, Generator, GradeError, GradeOptions,
    GradeResult, InstrumentKind, MovingTransform, Session, SessionStats, TickPosition,
};

use crate::error::{ApiError, ErrorCode};
use crate::eventlog::{read_all, Event, EventLog, EventRecord, LogError};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("event {seq}: {message}")]
    Replay { seq: u64, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IssuedExercise {
    pub exercise_id: String,
    pub kind: InstrumentKind,
}

/// What a quiz view may know about an exercise: where to draw the moving
/// scale, never the reading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExerciseView {
    pub exercise_id: String,
    pub kind: InstrumentKind,
    pub state: ExerciseState,
    pub transform: MovingTransform,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_transform: Option<MovingTransform>,
}

impl ExerciseView {
    pub fn of(ex: &Exercise) -> Result<Self, vmlab_core::Error> {
        let spec = default_spec(ex.kind());
        Ok(ExerciseView {
            exercise_id: ex.id().to_owned(),
            kind: ex.kind(),
            state: ex.state(),
            transform: moving_transform(&spec, ex.target())?,
            counter_transform: revolution_transform(&spec, ex.target())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Revealed {
    pub text: String,
    pub display_value: String,
}

#[derive(Debug)]
struct SessionEntry {
    session: Session,
    last_target: HashMap<InstrumentKind, TickPosition>,
}

#[derive(Debug)]
struct ExerciseEntry {
    session_id: String,
    exercise: Exercise,
}

#[derive(Debug)]
pub struct Lab {
    seed: u64,
    generator: Generator,
    issued: u64,
    sessions: HashMap<String, SessionEntry>,
    exercises: HashMap<String, ExerciseEntry>,
    log: Option<EventLog>,
    last_seq: u64,
    events: u64,
}

/// 28 lowercase letters: about 131 bits, URL-safe, and free of digits so
/// an id can never be mistaken for a reading.
pub fn random_id() -> String {
    let mut rng = rand::rng();
    (0..28).map(|_| char::from(b'a' + rng.random_range(0..26u8))).collect()
}

impl Lab {
    fn empty() -> Self {
        Lab {
            seed: 0,
            generator: Generator::new(0),
            issued: 0,
            sessions: HashMap::new(),
            exercises: HashMap::new(),
            log: None,
            last_seq: 0,
            events: 0,
        }
    }

    /// Opens (or starts) the log in `dir` and replays it. A fresh log is
    /// seeded from `seed`, or from entropy when `None`; an existing log
    /// keeps its recorded seed and generator state.
    pub fn open(dir: &Path, seed: Option<u64>) -> Result<Self, LabError> {
        let records = read_all(dir)?;
        let log = EventLog::open(dir)?;
        let mut lab = Lab::empty();
        for record in &records {
            lab.apply(record)?;
        }
        lab.log = Some(log);
        if records.is_empty() {
            let seed = seed.unwrap_or_else(rand::random);
            lab.commit(None, Event::ServerSeeded { seed })
                .map_err(|e| LabError::Replay { seq: 1, message: e.message })?;
        } else if seed.is_some_and(|s| s != lab.seed) {
            tracing::warn!(logged = lab.seed, requested = ?seed, "existing log keeps its recorded seed");
        }
        Ok(lab)
    }

    /// A lab with no persistence.
    pub fn ephemeral(seed: u64) -> Self {
        let mut lab = Lab::empty();
        lab.commit(None, Event::ServerSeeded { seed })
            .expect("no log to fail");
        lab
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generator_state(&self) -> u64 {
        self.generator.state()
    }

    /// Number of events applied (replayed plus written).
    pub fn event_count(&self) -> u64 {
        self.events
    }

    fn commit(&mut self, session_id: Option<String>, event: Event) -> Result<EventRecord, ApiError> {
        let record = EventRecord {
            seq: self.last_seq + 1,
            session_id,
            event,
            at: Utc::now(),
        };
        if let Some(log) = self.log.as_mut() {
            log.append(&record).map_err(|e| {
                tracing::error!("event log write failed: {e}");
                ApiError::internal("could not persist the request")
            })?;
        }
        self.apply(&record).map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(record)
    }

    /// Applies one record. Used for both live mutations and replay.
    pub fn apply(&mut self, record: &EventRecord) -> Result<(), LabError> {
        let fail = |message: String| LabError::Replay {
            seq: record.seq,
            message,
        };
        if self.events == 0 && !matches!(record.event, Event::ServerSeeded { .. }) {
            return Err(fail("log does not start with server_seeded".into()));
        }
        let sid = record.session_id.clone();
        match &record.event {
            Event::ServerSeeded { seed } => {
                self.seed = *seed;
                self.generator = Generator::new(*seed);
            }
            Event::SessionCreated { created_at } => {
                let sid = sid.ok_or_else(|| fail("session_created without session_id".into()))?;
                self.sessions.insert(
                    sid.clone(),
                    SessionEntry {
                        session: Session::new(sid, *created_at),
                        last_target: HashMap::new(),
                    },
                );
            }
            Event::ExerciseIssued {
                exercise_id,
                kind,
                target_ticks,
                seed_index,
                generator_state,
            } => {
                let sid = sid.ok_or_else(|| fail("exercise without session_id".into()))?;
                let entry = self
                    .sessions
                    .get_mut(&sid)
                    .ok_or_else(|| fail(format!("unknown session {sid}")))?;
                let target = default_spec(*kind)
                    .position((*target_ticks).into())
                    .map_err(|e| fail(e.to_string()))?;
                entry.last_target.insert(*kind, target);
                self.generator = Generator::new(*generator_state);
                self.issued = seed_index + 1;
                self.exercises.insert(
                    exercise_id.clone(),
                    ExerciseEntry {
                        session_id: sid,
                        exercise: Exercise::new(exercise_id.clone(), *kind, target, *seed_index),
                    },
                );
            }
            Event::ExerciseRevealed { exercise_id } => {
                self.exercises
                    .get_mut(exercise_id)
                    .ok_or_else(|| fail(format!("unknown exercise {exercise_id}")))?
                    .exercise
                    .close();
            }
            Event::AttemptGraded(attempt) => {
                let sid = sid.ok_or_else(|| fail("attempt without session_id".into()))?;
                self.exercises
                    .get_mut(&attempt.exercise_id)
                    .ok_or_else(|| fail(format!("unknown exercise {}", attempt.exercise_id)))?
                    .exercise
                    .close();
                self.sessions
                    .get_mut(&sid)
                    .ok_or_else(|| fail(format!("unknown session {sid}")))?
                    .session
                    .record(attempt.clone());
            }
        }
        self.last_seq = record.seq;
        self.events += 1;
        Ok(())
    }

    pub fn create_session(&mut self) -> Result<String, ApiError> {
        let sid = random_id();
        self.commit(Some(sid.clone()), Event::SessionCreated { created_at: Utc::now() })?;
        Ok(sid)
    }

    fn session(&self, sid: &str) -> Result<&SessionEntry, ApiError> {
        self.sessions
            .get(sid)
            .ok_or_else(|| ApiError::not_found(format!("no session {sid}")))
    }

    fn exercise(&self, sid: &str, eid: &str) -> Result<&Exercise, ApiError> {
        self.session(sid)?;
        self.exercises
            .get(eid)
            .filter(|e| e.session_id == sid)
            .map(|e| &e.exercise)
            .ok_or_else(|| ApiError::not_found(format!("no exercise {eid} in session {sid}")))
    }

    pub fn issue_exercise(&mut self, sid: &str, kind: InstrumentKind) -> Result<IssuedExercise, ApiError> {
        let previous = self.session(sid)?.last_target.get(&kind).copied();
        let spec = default_spec(kind);
        let mut gen = self.generator;
        let target = draw_target(&mut gen, &spec, previous);
        let exercise_id = random_id();
        self.commit(
            Some(sid.to_owned()),
            Event::ExerciseIssued {
                exercise_id: exercise_id.clone(),
                kind,
                target_ticks: target.ticks(),
                seed_index: self.issued,
                generator_state: gen.state(),
            },
        )?;
        Ok(IssuedExercise { exercise_id, kind })
    }

    pub fn exercise_view(&self, sid: &str, eid: &str) -> Result<ExerciseView, ApiError> {
        Ok(ExerciseView::of(self.exercise(sid, eid)?)?)
    }

    pub fn submit_answer(&mut self, sid: &str, eid: &str, text: &str) -> Result<GradeResult, ApiError> {
        let mut ex = self.exercise(sid, eid)?.clone();
        let spec = default_spec(ex.kind());
        let result = grade(&spec, &mut ex, text, GradeOptions::default()).map_err(|e| match e {
            GradeError::Malformed(p) => ApiError::malformed(format!("could not read {text:?}: {p}")),
            GradeError::AlreadyAnswered(id) => {
                ApiError::new(ErrorCode::AlreadyAnswered, format!("exercise {id} is closed"))
            }
            GradeError::Instrument(e) => e.into(),
        })?;
        self.commit(
            Some(sid.to_owned()),
            Event::AttemptGraded(AttemptRecord {
                exercise_id: eid.to_owned(),
                kind: ex.kind(),
                answer_raw: text.to_owned(),
                verdict: result.verdict,
                at: Utc::now(),
            }),
        )?;
        Ok(result)
    }

    /// Shows the reading of a quiz exercise and closes it unanswered.
    pub fn reveal_exercise(&mut self, sid: &str, eid: &str) -> Result<Revealed, ApiError> {
        let ex = self.exercise(sid, eid)?;
        if !ex.is_open() {
            return Err(ApiError::new(ErrorCode::AlreadyAnswered, format!("exercise {eid} is closed")));
        }
        let spec = default_spec(ex.kind());
        let revealed = Revealed {
            text: reveal(&spec, ex)?,
            display_value: format_value(&spec, ex.target())?,
        };
        self.commit(
            Some(sid.to_owned()),
            Event::ExerciseRevealed {
                exercise_id: eid.to_owned(),
            },
        )?;
        Ok(revealed)
    }

    pub fn stats(&self, sid: &str) -> Result<SessionStats, ApiError> {
        Ok(session_stats(&self.session(sid)?.session))
    }

    pub fn all_stats(&self) -> BTreeMap<String, SessionStats> {
        self.sessions
            .iter()
            .map(|(id, s)| (id.clone(), session_stats(&s.session)))
            .collect()
    }

    /// Open exercises as `(exercise_id, kind, target)`; server-side only.
    pub fn open_exercises(&self) -> Vec<(String, InstrumentKind, TickPosition)> {
        let mut v: Vec<_> = self
            .exercises
            .values()
            .filter(|e| e.exercise.is_open())
            .map(|e| (e.exercise.id().to_owned(), e.exercise.kind(), e.exercise.target()))
            .collect();
        v.sort();
        v
    }

    /// Target of an exercise, for tests and operators. Never exposed over HTTP.
    pub fn target_of(&self, eid: &str) -> Option<TickPosition> {
        self.exercises.get(eid).map(|e| e.exercise.target())
    }
}
