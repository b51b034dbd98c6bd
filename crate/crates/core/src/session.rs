//! Attempt history and the statistics derived from it.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::exercise::Verdict;
use crate::model::InstrumentKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub exercise_id: String,
    pub kind: InstrumentKind,
    pub answer_raw: String,
    pub verdict: Verdict,
    pub at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub created_at: DateTime<Utc>,
    attempts: Vec<AttemptRecord>,
}

impl Session {
    pub fn new(id: impl Into<String>, created_at: DateTime<Utc>) -> Self {
        Session {
            id: id.into(),
            created_at,
            attempts: Vec::new(),
        }
    }

    /// The log only grows.
    pub fn record(&mut self, attempt: AttemptRecord) {
        self.attempts.push(attempt);
    }

    pub fn attempts(&self) -> &[AttemptRecord] {
        &self.attempts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KindStats {
    pub attempts: u64,
    pub correct: u64,
    /// `correct / attempts`, or 0 with no attempts.
    pub accuracy: f64,
}

impl KindStats {
    fn add(&mut self, verdict: Verdict) {
        self.attempts += 1;
        if verdict == Verdict::Correct {
            self.correct += 1;
        }
        self.accuracy = self.correct as f64 / self.attempts as f64;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub overall: KindStats,
    /// Every kind is present, in menu order.
    pub per_kind: BTreeMap<InstrumentKind, KindStats>,
}

pub fn session_stats(session: &Session) -> SessionStats {
    stats_from_log(session.attempts())
}

/// Statistics from an attempt log alone.
pub fn stats_from_log(attempts: &[AttemptRecord]) -> SessionStats {
    let mut per_kind: BTreeMap<_, _> = InstrumentKind::ALL
        .iter()
        .map(|k| (*k, KindStats::default()))
        .collect();
    let mut overall = KindStats::default();
    for a in attempts {
        overall.add(a.verdict);
        per_kind.entry(a.kind).or_default().add(a.verdict);
    }
    SessionStats { overall, per_kind }
}

#[cfg(test)]
mod tests {
    use super::*;
    use InstrumentKind::*;

    fn attempt(kind: InstrumentKind, verdict: Verdict) -> AttemptRecord {
        AttemptRecord {
            exercise_id: "x".into(),
            kind,
            answer_raw: "1".into(),
            verdict,
            at: DateTime::UNIX_EPOCH,
        }
    }

    #[test]
    fn empty_session_is_all_zero() {
        let s = session_stats(&Session::new("s", DateTime::UNIX_EPOCH));
        assert_eq!(s.overall, KindStats::default());
        assert_eq!(s.per_kind.len(), 4);
        assert!(s.per_kind.values().all(|k| *k == KindStats::default()));
    }

    #[test]
    fn two_of_three() {
        let mut s = Session::new("s", DateTime::UNIX_EPOCH);
        s.record(attempt(VernierCaliper, Verdict::Correct));
        s.record(attempt(VernierCaliper, Verdict::Incorrect));
        s.record(attempt(DialIndicator, Verdict::Correct));
        let st = session_stats(&s);
        assert_eq!((st.overall.attempts, st.overall.correct), (3, 2));
        assert_eq!(st.overall.accuracy, 2.0 / 3.0);
        assert_eq!(st.per_kind[&VernierCaliper].accuracy, 0.5);
        assert_eq!(st.per_kind[&DialIndicator].correct, 1);
        assert_eq!(st.per_kind[&Micrometer].attempts, 0);
    }

    #[test]
    fn replayed_log_gives_same_stats() {
        let mut live = Session::new("s", DateTime::UNIX_EPOCH);
        let verdicts = [Verdict::Correct, Verdict::Incorrect, Verdict::Correct, Verdict::Correct];
        for (i, v) in verdicts.iter().enumerate() {
            live.record(attempt(InstrumentKind::ALL[i % 4], *v));
        }
        let json = serde_json::to_string(&live).unwrap();
        let replayed: Session = serde_json::from_str(&json).unwrap();
        assert_eq!(session_stats(&live), session_stats(&replayed));
        // Prefixes depend only on their own records.
        for n in 0..=verdicts.len() {
            assert_eq!(stats_from_log(&live.attempts()[..n]).overall.attempts, n as u64);
        }
    }

    #[test]
    fn per_kind_serializes_by_slug_in_menu_order() {
        let json = serde_json::to_string(&stats_from_log(&[])).unwrap();
        let i = |k: &str| json.find(k).unwrap();
        assert!(i("\"caliper\"") < i("\"micrometer\"") && i("\"micrometer\"") < i("\"dial\"") && i("\"dial\"") < i("\"protractor\""));
    }
}
