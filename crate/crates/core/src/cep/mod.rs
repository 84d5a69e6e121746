//! Complex event processing over vital-sign streams: a rule DSL, an engine
//! with atomic rule deployment, window reports, the cohort classifier and
//! the deployment-latency harness.

mod cohort;
mod engine;
mod load;
mod rules;
mod windows;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::vocab::{RDF_TYPE, XSD_INTEGER};
use crate::rdf::{RdfError, Term, Triple};

pub use cohort::{
    classify_cohort, generate_cohort, risk_distribution_csv, CohortReport, CohortSpec, GroundTruth, Outcome,
    PatientStream,
};
pub use engine::{correlate, CepEngine};
pub use load::{deploy_under_load, DeployRecord, LoadConfig, LoadReport};
pub use rules::{
    default_rules, parse_rule, parse_rules, resolve_field, Comparator, Condition, Rule, Threshold, RULE_1, RULE_2,
    RULE_3,
};
pub use windows::{window_stats, WindowRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CepError {
    #[error("rule parse error at offset {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown comparator '{op}' at offset {pos}")]
    UnknownComparator { pos: usize, op: String },
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("rule id '{0}' is already deployed")]
    DuplicateRule(String),
    #[error("out-of-order event for patient {patient}: ts {ts} < last {last}")]
    OutOfOrder { patient: String, ts: i64, last: i64 },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bad event record: {0}")]
    BadEvent(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

impl CepError {
    pub(crate) fn shifted(self, offset: usize) -> Self {
        match self {
            CepError::Parse { pos, message } => CepError::Parse { pos: pos + offset, message },
            CepError::UnknownComparator { pos, op } => CepError::UnknownComparator { pos: pos + offset, op },
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Tumbling,
    Sliding,
}

/// Event-time window. Tumbling windows have `slide_ms == length_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub length_ms: i64,
    pub slide_ms: i64,
}

impl WindowSpec {
    pub fn tumbling(length_ms: i64) -> Result<Self, CepError> {
        if length_ms <= 0 {
            return Err(CepError::InvalidWindow(format!("length must be positive, got {length_ms} ms")));
        }
        Ok(WindowSpec { kind: WindowKind::Tumbling, length_ms, slide_ms: length_ms })
    }

    pub fn sliding(length_ms: i64, slide_ms: i64) -> Result<Self, CepError> {
        if length_ms <= 0 || slide_ms <= 0 || slide_ms > length_ms {
            return Err(CepError::InvalidWindow(format!(
                "need 0 < slide <= length, got length {length_ms} ms, slide {slide_ms} ms"
            )));
        }
        Ok(WindowSpec { kind: WindowKind::Sliding, length_ms, slide_ms })
    }

    /// Start of the first window whose span reaches `ts` (windows start at
    /// non-negative multiples of the slide).
    pub(crate) fn first_start_covering(&self, ts: i64) -> i64 {
        let k = (ts - self.length_ms).div_euclid(self.slide_ms) + 1;
        k.max(0) * self.slide_ms
    }

    /// Starts of every window containing `ts`.
    pub fn starts_containing(&self, ts: i64) -> impl Iterator<Item = i64> {
        let slide = self.slide_ms;
        let last = ts.div_euclid(slide) * slide;
        let first = self.first_start_covering(ts);
        (0..).map(move |k| first + k * slide).take_while(move |s| *s <= last)
    }
}

/// One reading: time in milliseconds, patient and parameter values keyed
/// by field name (`hr`, `pulse`, `resp`, `spo2`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalEvent {
    pub ts: i64,
    pub patient: String,
    #[serde(flatten)]
    pub values: BTreeMap<String, f64>,
}

impl VitalEvent {
    pub fn new(ts: i64, patient: &str, values: &[(&str, f64)]) -> Self {
        VitalEvent {
            ts,
            patient: patient.to_string(),
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn get(&self, field: &str) -> Option<f64> {
        self.values.get(field).copied()
    }
}

/// Output of a rule firing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedEvent {
    pub ts: i64,
    pub patient: String,
    pub label: String,
    pub rule: String,
    /// Selected fields; always includes the condition field. For windowed
    /// rules these are window means.
    #[serde(flatten)]
    pub values: BTreeMap<String, f64>,
}

/// Reads newline-delimited JSON events, skipping blank lines.
pub fn read_events(text: &str) -> Result<Vec<VitalEvent>, CepError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CepError::BadEvent(format!("line {}: {e}", i + 1))))
        .collect()
}

pub fn write_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("derived records serialize"));
        out.push('\n');
    }
    out
}

fn local_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// Four triples per derived event: type, label, timestamp and triggering
/// rule. The subject is keyed by patient, timestamp and rule.
pub fn emit_rdf(derived: &[DerivedEvent], namespace: &str) -> Result<Vec<Triple>, CepError> {
    let mut out = Vec::with_capacity(derived.len() * 4);
    let p = |local: &str| Term::iri(format!("{namespace}{local}"));
    for d in derived {
        let s = p(&format!("Event_{}_{}_{}", local_safe(&d.patient), d.ts, local_safe(&d.rule)))?;
        out.push(Triple::new(s.clone(), Term::iri(RDF_TYPE)?, p("DetectedEvent")?)?);
        out.push(Triple::new(s.clone(), p("hasLabel")?, Term::string(d.label.clone()))?);
        out.push(Triple::new(
            s.clone(),
            p("hasTimestamp")?,
            Term::Literal { lexical: d.ts.to_string(), datatype: XSD_INTEGER.into() },
        )?);
        out.push(Triple::new(s, p("triggeredBy")?, Term::string(d.rule.clone()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_json_roundtrip() {
        let e = VitalEvent::new(1000, "P1", &[("hr", 72.0), ("spo2", 98.0)]);
        let line = serde_json::to_string(&e).unwrap();
        assert_eq!(line, r#"{"ts":1000,"patient":"P1","hr":72.0,"spo2":98.0}"#);
        assert_eq!(read_events(&format!("{line}\n\n{line}\n")).unwrap(), vec![e.clone(), e]);
        assert!(read_events("{\"ts\":1}").is_err());
    }

    #[test]
    fn window_membership() {
        let w = WindowSpec::sliding(10_000, 5_000).unwrap();
        assert_eq!(w.starts_containing(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(w.starts_containing(7_000).collect::<Vec<_>>(), vec![0, 5_000]);
        assert_eq!(w.starts_containing(10_000).collect::<Vec<_>>(), vec![5_000, 10_000]);
        let t = WindowSpec::tumbling(10_000).unwrap();
        assert_eq!(t.starts_containing(19_999).collect::<Vec<_>>(), vec![10_000]);
        assert!(WindowSpec::sliding(5, 10).is_err());
        assert!(WindowSpec::tumbling(0).is_err());
    }

    #[test]
    fn emit_counts() {
        assert!(emit_rdf(&[], "http://healthcare.org/ppg/").unwrap().is_empty());
        let d = DerivedEvent {
            ts: 5,
            patient: "P1".into(),
            label: "Tachycardia".into(),
            rule: "Rule 3".into(),
            values: [("hr".to_string(), 125.0)].into(),
        };
        let triples = emit_rdf(&[d], "http://healthcare.org/ppg/").unwrap();
        assert_eq!(triples.len(), 4);
        assert!(triples[0].subject.to_string().contains("Event_P1_5_Rule_3"));
    }
}
