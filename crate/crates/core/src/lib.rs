//! Virtual metrology lab core.
//!
//! Everything in this crate works on integer tick positions and exact
//! rationals. Floating point only appears when a renderer has to produce
//! pixel coordinates (see [`svg`]).
//!
//! - [`model`]: instrument specifications, ticks, exact values.
//! - [`format`]: display formatting and answer parsing.
//! - [`instruments`]: reading decomposition, composition and the vernier rule.
//! - [`geometry`]: position-independent scale layouts and per-position transforms.
//! - [`rng`], [`exercise`], [`session`]: seeded exercises, grading and statistics.
//! - [`svg`]: deterministic vector drawings.
//! - [`selftest`]: exhaustive sweeps used by the CLI and the acceptance suite.

pub mod error;
pub mod exercise;
pub mod format;
pub mod geometry;
pub mod instruments;
pub mod model;
pub mod rng;
pub mod selftest;
pub mod session;
pub mod svg;

pub use error::{Error, GradeError, ParseAnswerError};
pub use exercise::{
    draw_target, grade, reveal, Exercise, ExerciseState, ExerciseStream, GradeOptions,
    GradeResult, RevealPolicy, Verdict, MSG_CORRECT, MSG_INCORRECT,
};
pub use format::{format_value, parse_answer};
pub use geometry::{
    best_aligned_mark, geometry_template, moving_transform, revolution_transform, Layout, Mark,
    MarkTier, MovingTransform, ScaleGeometry, ScaleSide, TransformKind,
};
pub use instruments::{coincidence_index, compose, decompose, reading_text, Reading};
pub use model::{
    default_spec, ticks_to_value, Dimension, ExactValue, InstrumentKind, InstrumentSpec,
    SpecParams, TickPosition, Unit,
};
pub use rng::Generator;
pub use session::{session_stats, stats_from_log, AttemptRecord, KindStats, Session, SessionStats};

/// Exact rational used for every coordinate and value.
pub type Rational = num_rational::Ratio<i64>;
