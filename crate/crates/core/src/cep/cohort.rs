use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::thresholds::{Parameter, RangeTable, RiskLevel};

use super::rules::Rule;
use super::{CepEngine, CepError, VitalEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruth {
    Diseased,
    Healthy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatientStream {
    pub patient: String,
    pub events: Vec<VitalEvent>,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Labels of firings at moderate or high risk, with the worst risk seen
    /// for each.
    Diseased(BTreeMap<String, RiskLevel>),
    DiseaseFree,
    Undetected,
}

impl Outcome {
    pub fn risk(&self) -> Option<RiskLevel> {
        match self {
            Outcome::Diseased(labels) => labels.values().max().copied(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortReport {
    pub outcomes: Vec<(String, Outcome)>,
    pub diseased: usize,
    pub disease_free: usize,
    pub undetected: usize,
    /// Diseased patients detected plus healthy patients cleared.
    pub correct: usize,
    pub accuracy: f64,
}

fn range_level(ranges: &RangeTable<f64>, field: &str, value: f64) -> Option<RiskLevel> {
    let p: Parameter = field.parse().ok()?;
    ranges.classify_parameter(p, value).ok()
}

/// Runs each patient's stream through a fresh engine. A patient is diseased
/// when a firing's value is at least moderate risk, disease-free when every
/// ranged value is low risk, and undetected otherwise.
pub fn classify_cohort(
    patients: &[PatientStream],
    rules: &[Rule],
    ranges: &RangeTable<f64>,
) -> Result<CohortReport, CepError> {
    if patients.is_empty() {
        return Err(CepError::InvalidArgument("empty cohort".into()));
    }
    let mut outcomes = Vec::with_capacity(patients.len());
    let (mut diseased, mut disease_free, mut undetected, mut correct) = (0, 0, 0, 0);
    for p in patients {
        if p.events.is_empty() {
            return Err(CepError::InvalidArgument(format!("patient {} has no events", p.patient)));
        }
        let engine = CepEngine::with_rules(rules.to_vec())?;
        let fields: BTreeMap<String, String> = engine
            .rule_ids()
            .into_iter()
            .map(|id| {
                let field = engine.rule(&id).expect("deployed").condition.field;
                (id, field)
            })
            .collect();
        let mut labels: BTreeMap<String, RiskLevel> = BTreeMap::new();
        for d in engine.run(&p.events)? {
            let field = &fields[&d.rule];
            let Some(level) = d.values.get(field).and_then(|v| range_level(ranges, field, *v)) else { continue };
            if level >= RiskLevel::Moderate {
                let slot = labels.entry(d.label.clone()).or_insert(level);
                *slot = (*slot).max(level);
            }
        }
        let outcome = if !labels.is_empty() {
            diseased += 1;
            correct += usize::from(p.truth == GroundTruth::Diseased);
            Outcome::Diseased(labels)
        } else if p
            .events
            .iter()
            .all(|e| e.values.iter().all(|(f, v)| range_level(ranges, f, *v).is_none_or(|l| l == RiskLevel::Low)))
        {
            disease_free += 1;
            correct += usize::from(p.truth == GroundTruth::Healthy);
            Outcome::DiseaseFree
        } else {
            undetected += 1;
            Outcome::Undetected
        };
        outcomes.push((p.patient.clone(), outcome));
    }
    Ok(CohortReport {
        accuracy: correct as f64 / patients.len() as f64,
        outcomes,
        diseased,
        disease_free,
        undetected,
        correct,
    })
}

/// Per label: how many patients reached moderate and high risk.
pub fn risk_distribution_csv(report: &CohortReport) -> String {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (_, outcome) in &report.outcomes {
        if let Outcome::Diseased(labels) = outcome {
            for (label, level) in labels {
                let c = counts.entry(label).or_default();
                match level {
                    RiskLevel::High => c.1 += 1,
                    _ => c.0 += 1,
                }
            }
        }
    }
    let mut out = String::from("label,moderate,high\n");
    for (label, (m, h)) in counts {
        out.push_str(&format!("{label},{m},{h}\n"));
    }
    out
}

/// Recipe for a synthetic cohort. Unset counts scale the 60 diseased and
/// 12 borderline patients of an 81-patient cohort, rounding down.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortSpec {
    pub patients: usize,
    pub diseased: Option<usize>,
    pub undetected: Option<usize>,
    pub events_per_patient: usize,
    pub seed: u64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec { patients: 81, diseased: None, undetected: None, events_per_patient: 10, seed: 42 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Diseased(usize),
    Healthy,
    Borderline,
}

fn normal(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.gen_range(60..=95) as f64, rng.gen_range(96..=100) as f64, rng.gen_range(12..=18) as f64]
}

/// Builds streams at 1 Hz. Diseased patients have a few readings that break
/// a default rule; healthy ones stay in the low-risk band throughout;
/// borderline ones drift into a moderate band that no default rule covers.
pub fn generate_cohort(spec: &CohortSpec) -> Result<Vec<PatientStream>, CepError> {
    let n = spec.patients;
    let diseased = spec.diseased.unwrap_or(n * 60 / 81);
    let borderline = spec.undetected.unwrap_or(n * 12 / 81);
    if diseased + borderline > n {
        return Err(CepError::InvalidArgument(format!(
            "{diseased} diseased + {borderline} undetected exceeds {n} patients"
        )));
    }
    if spec.events_per_patient == 0 {
        return Err(CepError::InvalidArgument("need at least one event per patient".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut kinds: Vec<Kind> = (0..diseased)
        .map(Kind::Diseased)
        .chain(std::iter::repeat_n(Kind::Borderline, borderline))
        .chain(std::iter::repeat_n(Kind::Healthy, n - diseased - borderline))
        .collect();
    kinds.shuffle(&mut rng);

    let mut out = Vec::with_capacity(n);
    for (i, kind) in kinds.into_iter().enumerate() {
        let patient = format!("P{:03}", i + 1);
        let m = spec.events_per_patient;
        let abnormal: Vec<usize> = {
            let k = rng.gen_range(1..=3.min(m));
            rand::seq::index::sample(&mut rng, m, k).into_vec()
        };
        let events = (0..m)
            .map(|t| {
                let [mut hr, mut spo2, mut resp] = normal(&mut rng);
                if abnormal.contains(&t) {
                    match kind {
                        Kind::Diseased(j) => match j % 4 {
                            0 => hr = rng.gen_range(121..=150) as f64,
                            1 => hr = rng.gen_range(101..=119) as f64,
                            2 => spo2 = rng.gen_range(80..=89) as f64,
                            _ => resp = rng.gen_range(25..=35) as f64,
                        },
                        Kind::Borderline => {
                            if rng.gen_bool(0.5) {
                                resp = rng.gen_range(21..=24) as f64;
                            } else {
                                spo2 = rng.gen_range(90..=94) as f64;
                            }
                        }
                        Kind::Healthy => {}
                    }
                }
                VitalEvent::new(t as i64 * 1000, &patient, &[("hr", hr), ("pulse", hr), ("spo2", spo2), ("resp", resp)])
            })
            .collect();
        let truth = if kind == Kind::Healthy { GroundTruth::Healthy } else { GroundTruth::Diseased };
        out.push(PatientStream { patient, events, truth });
    }
    Ok(out)
}
