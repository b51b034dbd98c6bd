//! Instrument specifications and exact tick arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrumentKind {
    #[serde(rename = "caliper")]
    VernierCaliper,
    Micrometer,
    #[serde(rename = "dial")]
    DialIndicator,
    #[serde(rename = "protractor")]
    VernierProtractor,
}

impl InstrumentKind {
    /// Menu order.
    pub const ALL: [InstrumentKind; 4] = [
        InstrumentKind::VernierCaliper,
        InstrumentKind::Micrometer,
        InstrumentKind::DialIndicator,
        InstrumentKind::VernierProtractor,
    ];

    /// Short identifier used in URLs, CSV files and JSON.
    pub fn slug(self) -> &'static str {
        match self {
            InstrumentKind::VernierCaliper => "caliper",
            InstrumentKind::Micrometer => "micrometer",
            InstrumentKind::DialIndicator => "dial",
            InstrumentKind::VernierProtractor => "protractor",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            InstrumentKind::VernierCaliper => "Vernier caliper",
            InstrumentKind::Micrometer => "Micrometer",
            InstrumentKind::DialIndicator => "Dial indicator",
            InstrumentKind::VernierProtractor => "Protractor",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            InstrumentKind::VernierProtractor => Dimension::Angle,
            _ => Dimension::Length,
        }
    }

    pub fn has_vernier(self) -> bool {
        matches!(
            self,
            InstrumentKind::VernierCaliper | InstrumentKind::VernierProtractor
        )
    }
}

impl fmt::Display for InstrumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown instrument {0:?}; expected caliper, micrometer, dial or protractor")]
pub struct UnknownInstrument(pub String);

impl FromStr for InstrumentKind {
    type Err = UnknownInstrument;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "caliper" | "vernier-caliper" => Ok(InstrumentKind::VernierCaliper),
            "micrometer" => Ok(InstrumentKind::Micrometer),
            "dial" | "dial-indicator" => Ok(InstrumentKind::DialIndicator),
            "protractor" | "vernier-protractor" => Ok(InstrumentKind::VernierProtractor),
            _ => Err(UnknownInstrument(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Length,
    Angle,
}

impl Dimension {
    pub fn base_unit(self) -> Unit {
        match self {
            Dimension::Length => Unit::Millimetre,
            Dimension::Angle => Unit::Degree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "mm")]
    Millimetre,
    #[serde(rename = "μm")]
    Micrometre,
    #[serde(rename = "degree")]
    Degree,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        match self {
            Unit::Millimetre | Unit::Micrometre => Dimension::Length,
            Unit::Degree => Dimension::Angle,
        }
    }

    /// How many of this unit make one base unit (mm or degree).
    pub fn per_base(self) -> i64 {
        match self {
            Unit::Micrometre => 1000,
            Unit::Millimetre | Unit::Degree => 1,
        }
    }

    /// Symbol shown after a value.
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Millimetre => "mm",
            Unit::Micrometre => "μm",
            Unit::Degree => "°",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An integer count of least-count ticks. The only representation of an
/// instrument state; there is no sub-tick position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TickPosition(pub u32);

impl TickPosition {
    pub const ZERO: TickPosition = TickPosition(0);

    pub fn ticks(self) -> u32 {
        self.0
    }
}

impl fmt::Display for TickPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An exact quantity. The rational is always in lowest terms.
///
/// Equality and ordering compare the physical quantity, so `350 μm`
/// equals `0.35 mm`. Values of different dimensions are never equal and
/// are unordered.
#[derive(Debug, Clone, Copy)]
pub struct ExactValue {
    value: Rational,
    unit: Unit,
}

impl ExactValue {
    pub fn new(value: Rational, unit: Unit) -> Self {
        ExactValue { value, unit }
    }

    pub fn value(&self) -> Rational {
        self.value
    }

    pub fn num(&self) -> i64 {
        *self.value.numer()
    }

    pub fn den(&self) -> i64 {
        *self.value.denom()
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// Same quantity in mm or degrees.
    pub fn in_base(&self) -> Rational {
        self.value / Rational::from_integer(self.unit.per_base())
    }

    pub fn to_unit(&self, unit: Unit) -> Option<ExactValue> {
        (unit.dimension() == self.unit.dimension()).then(|| {
            ExactValue::new(self.in_base() * Rational::from_integer(unit.per_base()), unit)
        })
    }
}

impl PartialEq for ExactValue {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.unit.dimension() != other.unit.dimension() {
            return None;
        }
        Some(self.in_base().cmp(&other.in_base()))
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

/// Raw parameters for [`InstrumentSpec::new`]. Lengths are in mm and
/// angles in degrees regardless of the display unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecParams {
    pub kind: InstrumentKind,
    pub least_count: Rational,
    pub main_division: Rational,
    pub main_division_ticks: u32,
    pub range_max_ticks: u32,
    pub vernier_divisions: Option<u32>,
    pub divisions_per_revolution: Option<u32>,
    pub display_unit: Unit,
    pub display_decimals: u32,
}

/// A validated, immutable instrument description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstrumentSpec {
    params: SpecParams,
}

impl InstrumentSpec {
    pub fn new(params: SpecParams) -> Result<Self, Error> {
        let invalid = |msg: String| Err(Error::InvalidSpec(msg));
        let p = &params;
        if p.least_count <= Rational::from_integer(0) {
            return invalid(format!("least count {} must be positive", p.least_count));
        }
        if p.main_division_ticks == 0 || p.range_max_ticks == 0 {
            return invalid("tick counts must be positive".into());
        }
        if p.display_unit.dimension() != p.kind.dimension() {
            return invalid(format!("{} cannot be displayed in {}", p.kind, p.display_unit));
        }
        if p.least_count * Rational::from_integer(p.main_division_ticks.into()) != p.main_division {
            return invalid(format!(
                "{} ticks of {} do not make one main division of {}",
                p.main_division_ticks, p.least_count, p.main_division
            ));
        }
        if !p.range_max_ticks.is_multiple_of(p.main_division_ticks) {
            return invalid("range is not a whole number of main divisions".into());
        }
        match (p.kind.has_vernier(), p.vernier_divisions) {
            (true, Some(n)) if n >= 2 && n == p.main_division_ticks => {}
            (true, Some(n)) => {
                return invalid(format!(
                    "vernier divisions {n} must be >= 2 and equal main_division_ticks {}",
                    p.main_division_ticks
                ))
            }
            (true, None) => return invalid(format!("{} needs vernier divisions", p.kind)),
            (false, Some(_)) => return invalid(format!("{} has no vernier", p.kind)),
            (false, None) => {}
        }
        match (p.kind, p.divisions_per_revolution) {
            (InstrumentKind::DialIndicator, Some(d)) if d > 0 && p.range_max_ticks.is_multiple_of(d) => {}
            (InstrumentKind::DialIndicator, _) => {
                return invalid("dial needs divisions per revolution dividing the range".into())
            }
            (_, Some(_)) => return invalid(format!("{} has no dial", p.kind)),
            (_, None) => {}
        }
        let scaled = p.least_count
            * Rational::from_integer(p.display_unit.per_base())
            * Rational::from_integer(10i64.pow(p.display_decimals));
        if !scaled.is_integer() {
            return invalid(format!(
                "least count {} is not exact at {} decimals",
                p.least_count, p.display_decimals
            ));
        }
        Ok(InstrumentSpec { params })
    }

    /// Caliper with 1 mm main divisions and an `n`-division vernier.
    pub fn vernier_caliper(n: u32) -> Result<Self, Error> {
        Self::vernier(InstrumentKind::VernierCaliper, n, 150, Unit::Millimetre)
    }

    /// Protractor with 1° main divisions and an `n`-division vernier.
    pub fn vernier_protractor(n: u32) -> Result<Self, Error> {
        Self::vernier(InstrumentKind::VernierProtractor, n, 180, Unit::Degree)
    }

    fn vernier(kind: InstrumentKind, n: u32, span: u32, unit: Unit) -> Result<Self, Error> {
        let decimals = (0..=9)
            .find(|d| 10u64.pow(*d) % u64::from(n.max(1)) == 0)
            .ok_or_else(|| {
                Error::InvalidSpec(format!("1/{n} has no finite decimal expansion"))
            })?;
        InstrumentSpec::new(SpecParams {
            kind,
            least_count: Rational::new(1, n.max(1).into()),
            main_division: Rational::from_integer(1),
            main_division_ticks: n,
            range_max_ticks: span.checked_mul(n).ok_or_else(|| {
                Error::InvalidSpec(format!("vernier divisions {n} overflow the range"))
            })?,
            vernier_divisions: Some(n),
            divisions_per_revolution: None,
            display_unit: unit,
            display_decimals: decimals,
        })
    }

    pub fn kind(&self) -> InstrumentKind {
        self.params.kind
    }

    pub fn dimension(&self) -> Dimension {
        self.params.kind.dimension()
    }

    /// Least count in mm or degrees.
    pub fn least_count(&self) -> Rational {
        self.params.least_count
    }

    /// Main-scale division in mm or degrees.
    pub fn main_division(&self) -> Rational {
        self.params.main_division
    }

    pub fn main_division_ticks(&self) -> u32 {
        self.params.main_division_ticks
    }

    pub fn range_max_ticks(&self) -> u32 {
        self.params.range_max_ticks
    }

    pub fn vernier_divisions(&self) -> Option<u32> {
        self.params.vernier_divisions
    }

    pub fn divisions_per_revolution(&self) -> Option<u32> {
        self.params.divisions_per_revolution
    }

    pub fn display_unit(&self) -> Unit {
        self.params.display_unit
    }

    pub fn base_unit(&self) -> Unit {
        self.dimension().base_unit()
    }

    pub fn display_decimals(&self) -> u32 {
        self.params.display_decimals
    }

    /// Least count expressed in the display unit.
    pub fn least_count_display(&self) -> Rational {
        self.params.least_count * Rational::from_integer(self.params.display_unit.per_base())
    }

    pub fn params(&self) -> &SpecParams {
        &self.params
    }

    /// Checked constructor for a position on this instrument.
    pub fn position(&self, ticks: u64) -> Result<TickPosition, Error> {
        match u32::try_from(ticks) {
            Ok(t) if t <= self.params.range_max_ticks => Ok(TickPosition(t)),
            _ => Err(Error::OutOfRange {
                ticks,
                max: self.params.range_max_ticks,
            }),
        }
    }

    pub fn check(&self, pos: TickPosition) -> Result<TickPosition, Error> {
        self.position(pos.0.into())
    }

    pub fn positions(&self) -> impl Iterator<Item = TickPosition> {
        (0..=self.params.range_max_ticks).map(TickPosition)
    }
}

/// Canonical instrument for each kind.
///
/// | kind       | least count | main division      | range     | display    |
/// |------------|-------------|--------------------|-----------|------------|
/// | caliper    | 0.1 mm      | 1 mm, N = 10       | 0–150 mm  | mm, 1 dp   |
/// | micrometer | 0.01 mm     | 0.5 mm, thimble 50 | 0–25 mm   | mm, 2 dp   |
/// | dial       | 0.01 mm     | 100 per revolution | 0–10 mm   | μm, 0 dp   |
/// | protractor | 0.1°        | 1°, N = 10         | 0–180°    | degree, 1 dp |
pub fn default_spec(kind: InstrumentKind) -> InstrumentSpec {
    let spec = match kind {
        InstrumentKind::VernierCaliper => InstrumentSpec::vernier_caliper(10),
        InstrumentKind::VernierProtractor => InstrumentSpec::vernier_protractor(10),
        InstrumentKind::Micrometer => InstrumentSpec::new(SpecParams {
            kind,
            least_count: Rational::new(1, 100),
            main_division: Rational::new(1, 2),
            main_division_ticks: 50,
            range_max_ticks: 2500,
            vernier_divisions: None,
            divisions_per_revolution: None,
            display_unit: Unit::Millimetre,
            display_decimals: 2,
        }),
        InstrumentKind::DialIndicator => InstrumentSpec::new(SpecParams {
            kind,
            least_count: Rational::new(1, 100),
            main_division: Rational::new(1, 100),
            main_division_ticks: 1,
            range_max_ticks: 1000,
            vernier_divisions: None,
            divisions_per_revolution: Some(100),
            display_unit: Unit::Micrometre,
            display_decimals: 0,
        }),
    };
    spec.expect("default specs are valid")
}

/// `pos × least count`, in the display unit.
pub fn ticks_to_value(spec: &InstrumentSpec, pos: TickPosition) -> Result<ExactValue, Error> {
    spec.check(pos)?;
    Ok(ExactValue::new(
        spec.least_count_display() * Rational::from_integer(pos.0.into()),
        spec.display_unit(),
    ))
}

/// `10^exp` as an i64, failing on overflow.
pub(crate) fn pow10(exp: u32) -> Option<i64> {
    10i64.checked_pow(exp)
}

/// Least common multiple of a slice of positive denominators.
pub(crate) fn lcm_all(dens: impl IntoIterator<Item = i64>) -> i64 {
    dens.into_iter().fold(1, |acc, d| acc.lcm(&d))
}
