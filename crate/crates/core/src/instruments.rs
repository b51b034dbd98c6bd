//! Reading an instrument: splitting a tick position into the scale
//! components a student reads off, and putting them back together.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::format::{format_value, trimmed_decimal};
use crate::model::{InstrumentKind, InstrumentSpec, TickPosition};
use crate::Rational;

/// Scale components of one position, tagged by instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reading {
    /// Whole main divisions passed by the vernier zero, plus the
    /// coinciding vernier mark.
    Caliper { main_mm: u32, vernier_index: u32 },
    /// Half-millimetre sleeve marks passed, plus the thimble graduation on
    /// the reference line.
    Micrometer {
        sleeve_divisions: u32,
        thimble_index: u32,
    },
    Dial { revolutions: u32, dial_index: u32 },
    Protractor { degrees: u32, vernier_index: u32 },
}

impl Reading {
    pub fn kind(&self) -> InstrumentKind {
        match self {
            Reading::Caliper { .. } => InstrumentKind::VernierCaliper,
            Reading::Micrometer { .. } => InstrumentKind::Micrometer,
            Reading::Dial { .. } => InstrumentKind::DialIndicator,
            Reading::Protractor { .. } => InstrumentKind::VernierProtractor,
        }
    }

    /// `(coarse, fine)` components in scale order.
    fn parts(&self) -> (u32, u32) {
        match *self {
            Reading::Caliper { main_mm, vernier_index } => (main_mm, vernier_index),
            Reading::Micrometer { sleeve_divisions, thimble_index } => (sleeve_divisions, thimble_index),
            Reading::Dial { revolutions, dial_index } => (revolutions, dial_index),
            Reading::Protractor { degrees, vernier_index } => (degrees, vernier_index),
        }
    }
}

/// Ticks per unit of the coarse component.
fn coarse_ticks(spec: &InstrumentSpec) -> u32 {
    spec.divisions_per_revolution()
        .unwrap_or_else(|| spec.main_division_ticks())
}

pub fn decompose(spec: &InstrumentSpec, pos: TickPosition) -> Result<Reading, Error> {
    let t = spec.check(pos)?.ticks();
    let per = coarse_ticks(spec);
    let (coarse, fine) = (t / per, t % per);
    Ok(match spec.kind() {
        InstrumentKind::VernierCaliper => Reading::Caliper {
            main_mm: coarse,
            vernier_index: fine,
        },
        InstrumentKind::Micrometer => Reading::Micrometer {
            sleeve_divisions: coarse,
            thimble_index: fine,
        },
        InstrumentKind::DialIndicator => Reading::Dial {
            revolutions: coarse,
            dial_index: fine,
        },
        InstrumentKind::VernierProtractor => Reading::Protractor {
            degrees: coarse,
            vernier_index: fine,
        },
    })
}

pub fn compose(spec: &InstrumentSpec, reading: Reading) -> Result<TickPosition, Error> {
    if reading.kind() != spec.kind() {
        return Err(Error::KindMismatch {
            expected: spec.kind(),
            actual: reading.kind(),
        });
    }
    let per = coarse_ticks(spec);
    let (coarse, fine) = reading.parts();
    if fine >= per {
        let component = match reading {
            Reading::Caliper { .. } | Reading::Protractor { .. } => "vernier_index",
            Reading::Micrometer { .. } => "thimble_index",
            Reading::Dial { .. } => "dial_index",
        };
        return Err(Error::ComponentOutOfBounds {
            component,
            value: fine,
            limit: per,
        });
    }
    let ticks = u64::from(coarse) * u64::from(per) + u64::from(fine);
    spec.position(ticks)
}

/// Index of the vernier mark that lines up with a main-scale mark.
pub fn coincidence_index(spec: &InstrumentSpec, pos: TickPosition) -> Result<u32, Error> {
    let n = spec
        .vernier_divisions()
        .ok_or(Error::NotVernier(spec.kind()))?;
    Ok(spec.check(pos)?.ticks() % n)
}

/// One-line breakdown shown in show-reading mode, e.g.
/// `main 12 mm + vernier 3 × 0.1 mm = 12.3 mm`.
pub fn reading_text(spec: &InstrumentSpec, pos: TickPosition) -> Result<String, Error> {
    let reading = decompose(spec, pos)?;
    let value = format_value(spec, pos)?;
    let unit = spec.display_unit().symbol();
    let lc = decimal(spec.least_count_display());
    let (coarse, fine) = reading.parts();
    Ok(match reading {
        Reading::Caliper { .. } | Reading::Protractor { .. } => {
            let main = decimal(spec.main_division() * Rational::from_integer(coarse.into()));
            format!("main {main} {unit} + vernier {fine} × {lc} {unit} = {value} {unit}")
        }
        Reading::Micrometer { .. } => {
            let sleeve = decimal(spec.main_division());
            format!("sleeve {coarse} × {sleeve} {unit} + thimble {fine} × {lc} {unit} = {value} {unit}")
        }
        Reading::Dial { .. } => {
            format!("revolutions {coarse} + dial {fine} × {lc} {unit} = {value} {unit}")
        }
    })
}

fn decimal(value: Rational) -> String {
    trimmed_decimal(value).expect("spec validation guarantees terminating decimals")
}
