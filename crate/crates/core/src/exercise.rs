//! Hidden-target reading exercises and grading.

use serde::{Deserialize, Serialize};

use crate::error::{Error, GradeError};
use crate::format::{format_value, parse_answer};
use crate::instruments::reading_text;
use crate::model::{ticks_to_value, InstrumentKind, InstrumentSpec, TickPosition};
use crate::rng::Generator;
use crate::Rational;

pub const MSG_CORRECT: &str = "Well done";
pub const MSG_INCORRECT: &str = "Sorry, wrong answer!";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    Incorrect,
}

impl Verdict {
    pub fn message(self) -> &'static str {
        match self {
            Verdict::Correct => MSG_CORRECT,
            Verdict::Incorrect => MSG_INCORRECT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExerciseState {
    Open,
    Answered,
}

/// A trial with a hidden target. Deliberately not `Serialize`: the target
/// must never reach a client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exercise {
    id: String,
    kind: InstrumentKind,
    target: TickPosition,
    seed_index: u64,
    state: ExerciseState,
}

impl Exercise {
    pub fn new(id: impl Into<String>, kind: InstrumentKind, target: TickPosition, seed_index: u64) -> Self {
        Exercise {
            id: id.into(),
            kind,
            target,
            seed_index,
            state: ExerciseState::Open,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> InstrumentKind {
        self.kind
    }

    pub fn target(&self) -> TickPosition {
        self.target
    }

    pub fn seed_index(&self) -> u64 {
        self.seed_index
    }

    pub fn state(&self) -> ExerciseState {
        self.state
    }

    pub fn is_open(&self) -> bool {
        self.state == ExerciseState::Open
    }

    /// Closes the exercise. There is no way back to open.
    pub fn close(&mut self) {
        self.state = ExerciseState::Answered;
    }
}

/// Draws a target in `1..=range_max_ticks`. If it repeats `previous`, one
/// more draw is taken and kept whatever it is.
pub fn draw_target(gen: &mut Generator, spec: &InstrumentSpec, previous: Option<TickPosition>) -> TickPosition {
    let hi = spec.range_max_ticks().into();
    let mut draw = || TickPosition(gen.uniform_ticks(1, hi).expect("range_max_ticks >= 1") as u32);
    let first = draw();
    if Some(first) == previous {
        draw()
    } else {
        first
    }
}

/// A self-contained exercise source: one generator, the last target per
/// kind, and sequential ids `ex-1`, `ex-2`, ...
#[derive(Debug, Clone)]
pub struct ExerciseStream {
    gen: Generator,
    issued: u64,
    last: [Option<TickPosition>; 4],
}

impl ExerciseStream {
    pub fn new(seed: u64) -> Self {
        ExerciseStream {
            gen: Generator::new(seed),
            issued: 0,
            last: [None; 4],
        }
    }

    pub fn next_exercise(&mut self, spec: &InstrumentSpec) -> Exercise {
        let slot = InstrumentKind::ALL
            .iter()
            .position(|k| *k == spec.kind())
            .expect("all kinds listed");
        let target = draw_target(&mut self.gen, spec, self.last[slot]);
        self.last[slot] = Some(target);
        let index = self.issued;
        self.issued += 1;
        Exercise::new(format!("ex-{}", index + 1), spec.kind(), target, index)
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RevealPolicy {
    #[default]
    Never,
    OnIncorrect,
    Always,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GradeOptions {
    /// Accepted distance from the target, in ticks.
    pub tolerance_ticks: u32,
    pub reveal: RevealPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeResult {
    pub verdict: Verdict,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub correct_value: Option<String>,
}

/// Grades `answer` against the exercise target and closes the exercise.
///
/// Malformed text leaves the exercise open so the student can retype.
pub fn grade(
    spec: &InstrumentSpec,
    ex: &mut Exercise,
    answer: &str,
    opts: GradeOptions,
) -> Result<GradeResult, GradeError> {
    if ex.kind != spec.kind() {
        return Err(Error::KindMismatch {
            expected: spec.kind(),
            actual: ex.kind,
        }
        .into());
    }
    if !ex.is_open() {
        return Err(GradeError::AlreadyAnswered(ex.id.clone()));
    }
    let given = parse_answer(spec, answer)?;
    let truth = ticks_to_value(spec, ex.target)?;
    let tolerance = spec.least_count_display() * Rational::from_integer(opts.tolerance_ticks.into());
    let diff = given.value() - truth.value();
    let distance = if diff < Rational::from_integer(0) { -diff } else { diff };
    let verdict = if distance <= tolerance {
        Verdict::Correct
    } else {
        Verdict::Incorrect
    };
    ex.close();
    let reveal = match opts.reveal {
        RevealPolicy::Never => false,
        RevealPolicy::OnIncorrect => verdict == Verdict::Incorrect,
        RevealPolicy::Always => true,
    };
    Ok(GradeResult {
        verdict,
        message: verdict.message().to_owned(),
        correct_value: if reveal { Some(format_value(spec, ex.target)?) } else { None },
    })
}

/// Show-reading text for the hidden target. Does not change the exercise.
pub fn reveal(spec: &InstrumentSpec, ex: &Exercise) -> Result<String, Error> {
    reading_text(spec, ex.target)
}
