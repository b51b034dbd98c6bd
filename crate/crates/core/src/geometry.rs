//! Renderer-agnostic scale layouts.
//!
//! A [`ScaleGeometry`] never depends on the instrument position. The
//! position enters only through [`moving_transform`] (and, for the dial's
//! revolution counter, [`revolution_transform`]).

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::format::trimmed_decimal;
use crate::model::{lcm_all, InstrumentKind, InstrumentSpec, TickPosition, Unit};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSide {
    Fixed,
    Moving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkTier {
    Major,
    Minor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Linear,
    Circular,
}

/// One graduation. `axis_pos` is in mm for linear scales and degrees for
/// circular ones; moving marks use the moving scale's local coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mark {
    pub scale: ScaleSide,
    #[serde(with = "rational_json")]
    pub axis_pos: Rational,
    pub tier: MarkTier,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
}

/// Parameters a renderer needs alongside the marks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub kind: InstrumentKind,
    #[serde(with = "rational_json")]
    pub least_count: Rational,
    pub base_unit: Unit,
    #[serde(with = "rational_json")]
    pub main_division: Rational,
    pub main_division_ticks: u32,
    pub range_max_ticks: u32,
    pub vernier_divisions: Option<u32>,
    pub divisions_per_revolution: Option<u32>,
    pub display_unit: Unit,
    pub display_decimals: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGeometry {
    pub layout: Layout,
    pub fixed_marks: Vec<Mark>,
    /// Vernier graduations (caliper, protractor) or thimble graduations
    /// (micrometer, local coordinate = spindle advance per graduation).
    pub moving_marks: Vec<Mark>,
    /// Dial hands at rest: main hand first, then the revolution counter.
    pub pointers: Vec<Mark>,
    /// Revolution-counter graduations, in degrees.
    pub counter_marks: Vec<Mark>,
    pub metadata: SpecEcho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Translation,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovingTransform {
    pub kind: TransformKind,
    #[serde(with = "rational_json")]
    pub amount: Rational,
}

impl MovingTransform {
    pub fn is_identity(&self) -> bool {
        self.amount == Rational::from_integer(0)
    }
}

fn int(v: u32) -> Rational {
    Rational::from_integer(v.into())
}

fn mark(scale: ScaleSide, axis_pos: Rational, label: Option<String>) -> Mark {
    Mark {
        scale,
        axis_pos,
        tier: if label.is_some() { MarkTier::Major } else { MarkTier::Minor },
        label,
    }
}

fn label(value: Rational) -> String {
    trimmed_decimal(value).expect("terminating")
}

/// Number of main divisions drawn on the fixed scale. Vernier instruments
/// carry N−1 extra divisions so the vernier stays over graduations at the
/// end of the range.
fn fixed_divisions(spec: &InstrumentSpec) -> u32 {
    let range = spec.range_max_ticks() / spec.main_division_ticks();
    range + spec.vernier_divisions().map_or(0, |n| n - 1)
}

pub fn geometry_template(spec: &InstrumentSpec) -> ScaleGeometry {
    let d = spec.main_division();
    let echo = SpecEcho {
        kind: spec.kind(),
        least_count: spec.least_count(),
        base_unit: spec.base_unit(),
        main_division: d,
        main_division_ticks: spec.main_division_ticks(),
        range_max_ticks: spec.range_max_ticks(),
        vernier_divisions: spec.vernier_divisions(),
        divisions_per_revolution: spec.divisions_per_revolution(),
        display_unit: spec.display_unit(),
        display_decimals: spec.display_decimals(),
    };

    match spec.kind() {
        InstrumentKind::VernierCaliper | InstrumentKind::VernierProtractor => {
            let n = spec.vernier_divisions().expect("vernier kind");
            // Label every tenth main division (10 mm or 10°).
            let label_every = (Rational::from_integer(10) / d).to_integer().max(1) as u32;
            let fixed_marks = (0..=fixed_divisions(spec))
                .map(|i| {
                    let pos = d * int(i);
                    mark(ScaleSide::Fixed, pos, (i % label_every == 0).then(|| label(pos)))
                })
                .collect();
            let step = d * Rational::new((n - 1).into(), n.into());
            let moving_marks = (0..=n)
                .map(|j| Mark {
                    scale: ScaleSide::Moving,
                    axis_pos: step * int(j),
                    tier: if (2 * j) % n == 0 { MarkTier::Major } else { MarkTier::Minor },
                    label: ((10 * j) % n == 0).then(|| (10 * j / n).to_string()),
                })
                .collect();
            ScaleGeometry {
                layout: if spec.kind() == InstrumentKind::VernierCaliper {
                    Layout::Linear
                } else {
                    Layout::Circular
                },
                fixed_marks,
                moving_marks,
                pointers: Vec::new(),
                counter_marks: Vec::new(),
                metadata: echo,
            }
        }
        InstrumentKind::Micrometer => {
            let per_mm = (Rational::from_integer(1) / d).to_integer().max(1) as u32;
            let fixed_marks = (0..=fixed_divisions(spec))
                .map(|i| {
                    let pos = d * int(i);
                    mark(ScaleSide::Fixed, pos, (i % per_mm == 0).then(|| label(pos)))
                })
                .collect();
            let lc = spec.least_count();
            let moving_marks = (0..spec.main_division_ticks())
                .map(|j| mark(ScaleSide::Moving, lc * int(j), (j % 5 == 0).then(|| j.to_string())))
                .collect();
            ScaleGeometry {
                layout: Layout::Linear,
                fixed_marks,
                moving_marks,
                pointers: Vec::new(),
                counter_marks: Vec::new(),
                metadata: echo,
            }
        }
        InstrumentKind::DialIndicator => {
            let per_rev = spec.divisions_per_revolution().expect("dial kind");
            let step = Rational::new(360, per_rev.into());
            let fixed_marks = (0..per_rev)
                .map(|i| mark(ScaleSide::Fixed, step * int(i), (i % 10 == 0).then(|| i.to_string())))
                .collect();
            let revs = spec.range_max_ticks() / per_rev;
            let counter_step = Rational::new(360, revs.into());
            let counter_marks = (0..revs)
                .map(|i| mark(ScaleSide::Fixed, counter_step * int(i), Some(i.to_string())))
                .collect();
            let zero = Rational::from_integer(0);
            let pointers = vec![
                mark(ScaleSide::Moving, zero, Some("main".into())),
                mark(ScaleSide::Moving, zero, Some("revolutions".into())),
            ];
            ScaleGeometry {
                layout: Layout::Circular,
                fixed_marks,
                moving_marks: Vec::new(),
                pointers,
                counter_marks,
                metadata: echo,
            }
        }
    }
}

/// Where the moving scale (or the dial's main hand) sits for `pos`.
/// Dial rotations are clockwise from twelve o'clock.
pub fn moving_transform(spec: &InstrumentSpec, pos: TickPosition) -> Result<MovingTransform, Error> {
    let t = spec.check(pos)?.ticks();
    Ok(match spec.kind() {
        InstrumentKind::VernierCaliper | InstrumentKind::Micrometer => MovingTransform {
            kind: TransformKind::Translation,
            amount: spec.least_count() * int(t),
        },
        InstrumentKind::VernierProtractor => MovingTransform {
            kind: TransformKind::Rotation,
            amount: spec.least_count() * int(t),
        },
        InstrumentKind::DialIndicator => {
            let per_rev = spec.divisions_per_revolution().expect("dial kind");
            MovingTransform {
                kind: TransformKind::Rotation,
                amount: Rational::new(360, per_rev.into()) * int(t % per_rev),
            }
        }
    })
}

/// Rotation of the dial's revolution counter hand; `None` for other kinds.
pub fn revolution_transform(
    spec: &InstrumentSpec,
    pos: TickPosition,
) -> Result<Option<MovingTransform>, Error> {
    let t = spec.check(pos)?.ticks();
    let Some(per_rev) = spec.divisions_per_revolution() else {
        return Ok(None);
    };
    let revs = spec.range_max_ticks() / per_rev;
    Ok(Some(MovingTransform {
        kind: TransformKind::Rotation,
        amount: Rational::new(360, revs.into()) * int((t / per_rev) % revs),
    }))
}

/// For each vernier mark, the distance to its nearest fixed mark after the
/// moving scale is placed at `pos`. Computed by exhaustive comparison over
/// every (vernier mark, fixed mark) pair.
pub fn alignment_distances(spec: &InstrumentSpec, pos: TickPosition) -> Result<Vec<Rational>, Error> {
    if spec.vernier_divisions().is_none() {
        return Err(Error::NotVernier(spec.kind()));
    }
    let geometry = geometry_template(spec);
    Ok(distances_in(&geometry, moving_transform(spec, pos)?.amount))
}

pub(crate) fn distances_in(geometry: &ScaleGeometry, shift: Rational) -> Vec<Rational> {
    // Scale everything to one common denominator so the sweep is integer-only.
    let den = lcm_all(
        geometry
            .fixed_marks
            .iter()
            .chain(&geometry.moving_marks)
            .map(|m| *m.axis_pos.denom())
            .chain([*shift.denom()]),
    );
    let scaled = |r: Rational| r.numer() * (den / r.denom());
    let fixed: Vec<i64> = geometry.fixed_marks.iter().map(|m| scaled(m.axis_pos)).collect();
    let shift = scaled(shift);
    geometry
        .moving_marks
        .iter()
        .map(|m| {
            let placed = scaled(m.axis_pos) + shift;
            let best = fixed
                .iter()
                .map(|f| (placed - f).abs())
                .min()
                .expect("fixed scale is never empty");
            Rational::new(best, den)
        })
        .collect()
}

/// Smallest index among the minimal distances.
pub(crate) fn first_minimum(distances: &[Rational]) -> u32 {
    let (index, _) = distances
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.cmp(b).then(ia.cmp(ib)))
        .expect("vernier has marks");
    index as u32
}

/// The vernier mark that best lines up with any fixed mark; ties go to the
/// smallest index.
pub fn best_aligned_mark(spec: &InstrumentSpec, pos: TickPosition) -> Result<u32, Error> {
    Ok(first_minimum(&alignment_distances(spec, pos)?))
}

/// `{"num": n, "den": d}` encoding for rationals.
pub mod rational_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::Rational;

    #[derive(Serialize, Deserialize)]
    struct Fraction {
        num: i64,
        den: i64,
    }

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Fraction {
            num: *value.numer(),
            den: *value.denom(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let f = Fraction::deserialize(d)?;
        if f.den <= 0 {
            return Err(serde::de::Error::custom("denominator must be positive"));
        }
        Ok(Rational::new(f.num, f.den))
    }
}
