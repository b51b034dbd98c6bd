//! Exhaustive consistency sweeps over whole instrument ranges.

use std::fmt;

use crate::geometry::{distances_in, first_minimum, geometry_template, moving_transform, ScaleGeometry};
use crate::instruments::{coincidence_index, compose, decompose};
use crate::model::{default_spec, InstrumentKind, InstrumentSpec, TickPosition};
use crate::Rational;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub roundtrip_ok: u64,
    pub roundtrip_total: u64,
    pub coincidence_ok: u64,
    pub coincidence_total: u64,
    /// First few failures, for diagnostics.
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.roundtrip_ok == self.roundtrip_total && self.coincidence_ok == self.coincidence_total
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 10 {
            self.failures.push(msg);
        }
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = |ok, total| if ok == total { "ok" } else { "FAIL" };
        write!(
            f,
            "roundtrip {}/{} {}, coincidence {}/{} {}",
            self.roundtrip_ok,
            self.roundtrip_total,
            status(self.roundtrip_ok, self.roundtrip_total),
            self.coincidence_ok,
            self.coincidence_total,
            status(self.coincidence_ok, self.coincidence_total),
        )
    }
}

/// Deliberate corruption, used to prove the sweep can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Shift the composed position at the last tick of the first spec.
    RoundTripOffByOne,
    /// Report the wrong coincidence index at the first vernier position.
    CoincidenceOffByOne,
}

pub fn default_specs() -> Vec<InstrumentSpec> {
    InstrumentKind::ALL.iter().map(|k| default_spec(*k)).collect()
}

pub fn run(specs: &[InstrumentSpec]) -> SweepReport {
    run_with(specs, None)
}

/// Round trip `compose(decompose(p)) == p` at every position, and for
/// vernier instruments: the arithmetic coincidence index equals the
/// geometric best-aligned mark, with the best alignment exactly 0 and the
/// next-best exactly one main division / N.
pub fn run_with(specs: &[InstrumentSpec], fault: Option<Fault>) -> SweepReport {
    let mut report = SweepReport::default();
    for (si, spec) in specs.iter().enumerate() {
        let geometry = geometry_template(spec);
        for pos in spec.positions() {
            report.roundtrip_total += 1;
            let mut back = decompose(spec, pos).and_then(|r| compose(spec, r));
            if fault == Some(Fault::RoundTripOffByOne) && si == 0 && pos.ticks() == spec.range_max_ticks() {
                back = back.map(|p| TickPosition(p.ticks() - 1));
            }
            match back {
                Ok(p) if p == pos => report.roundtrip_ok += 1,
                other => report.fail(format!("{} roundtrip at {pos}: {other:?}", spec.kind())),
            }

            let Some(n) = spec.vernier_divisions() else { continue };
            report.coincidence_total += 1;
            match check_vernier(spec, &geometry, pos, n) {
                Ok(mut index) => {
                    if fault == Some(Fault::CoincidenceOffByOne) && report.coincidence_total == 1 {
                        index.0 += 1;
                    }
                    if index.0 == index.1 {
                        report.coincidence_ok += 1;
                    } else {
                        report.fail(format!(
                            "{} coincidence at {pos}: arithmetic {} vs geometric {}",
                            spec.kind(),
                            index.0,
                            index.1
                        ));
                    }
                }
                Err(msg) => report.fail(format!("{} at {pos}: {msg}", spec.kind())),
            }
        }
    }
    report
}

/// `(coincidence_index, best_aligned_mark)` after checking the gap property.
fn check_vernier(
    spec: &InstrumentSpec,
    geometry: &ScaleGeometry,
    pos: TickPosition,
    n: u32,
) -> Result<(u32, u32), String> {
    let arithmetic = coincidence_index(spec, pos).map_err(|e| e.to_string())?;
    let shift = moving_transform(spec, pos).map_err(|e| e.to_string())?.amount;
    let mut distances = distances_in(geometry, shift);
    let geometric = first_minimum(&distances);
    distances.sort();
    distances.dedup();
    let gap = spec.main_division() / Rational::from_integer(n.into());
    match distances.as_slice() {
        [best, next, ..] if *best == Rational::from_integer(0) && *next == gap => Ok((arithmetic, geometric)),
        other => Err(format!("alignment distances {:?} expected 0 then {gap}", &other[..other.len().min(2)])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass_with_expected_totals() {
        let r = run(&default_specs());
        assert!(r.passed(), "{r} {:?}", r.failures);
        assert_eq!(r.roundtrip_total, 1501 + 2501 + 1001 + 1801);
        assert_eq!(r.coincidence_total, 1501 + 1801);
        assert_eq!(r.to_string(), "roundtrip 6804/6804 ok, coincidence 3302/3302 ok");
    }

    #[test]
    fn faults_are_detected() {
        let r = run_with(&default_specs(), Some(Fault::RoundTripOffByOne));
        assert!(!r.passed());
        assert_eq!(r.roundtrip_ok, r.roundtrip_total - 1);
        let r = run_with(&default_specs(), Some(Fault::CoincidenceOffByOne));
        assert!(!r.passed());
        assert!(r.to_string().ends_with("3301/3302 FAIL"));
    }

    #[test]
    fn finer_verniers_pass() {
        let specs = [
            InstrumentSpec::vernier_caliper(20).unwrap(),
            InstrumentSpec::vernier_caliper(50).unwrap(),
            InstrumentSpec::vernier_protractor(20).unwrap(),
        ];
        let r = run(&specs);
        assert!(r.passed(), "{:?}", r.failures);
    }
}
