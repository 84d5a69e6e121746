use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use crate::thresholds::{EwmaAccumulator, ThresholdModel};

use super::rules::{resolve_field, Rule, Threshold};
use super::{CepError, DerivedEvent, VitalEvent};

#[derive(Debug)]
struct Deployed {
    id: String,
    rule: Rule,
    /// Event fields copied into derived events; the condition field first.
    fields: Vec<String>,
}

#[derive(Debug, Default, Clone)]
struct WindowAcc {
    count: usize,
    sums: BTreeMap<String, f64>,
}

#[derive(Debug, Default)]
struct RuleState {
    history: Vec<f64>,
    ewma: Option<EwmaAccumulator<f64>>,
    windows: BTreeMap<i64, WindowAcc>,
}

#[derive(Debug, Default)]
struct State {
    last_ts: HashMap<String, i64>,
    per_rule: BTreeMap<(String, String), RuleState>,
}

/// Rule engine. Rules live in an immutable snapshot that deployment
/// replaces wholesale, so an event is evaluated against exactly the rule
/// set current when its processing starts.
#[derive(Debug, Default)]
pub struct CepEngine {
    rules: RwLock<Arc<Vec<Arc<Deployed>>>>,
    state: Mutex<State>,
    auto_id: AtomicUsize,
}

impl RuleState {
    /// Threshold from the history seen so far; `None` while the model lacks
    /// history. Records `value` afterwards.
    fn threshold_then_record(&mut self, threshold: &Threshold, value: f64) -> Option<f64> {
        match threshold {
            Threshold::Literal { value: t, .. } => Some(*t),
            Threshold::Model(ThresholdModel::Ewma { alpha, init }) => {
                let acc = self
                    .ewma
                    .get_or_insert_with(|| EwmaAccumulator::new(*alpha, *init).expect("validated at parse time"));
                let t = acc.value();
                acc.update(value);
                t
            }
            Threshold::Model(model) => {
                let t = model.evaluate(&self.history).ok();
                self.history.push(value);
                if let Some(keep) = model.window_len() {
                    let keep = keep.max(1);
                    if self.history.len() > keep {
                        self.history.drain(..self.history.len() - keep);
                    }
                }
                t
            }
        }
    }
}

impl Deployed {
    fn new(id: String, rule: Rule) -> Self {
        let mut fields = vec![rule.condition.field.clone()];
        for name in &rule.select {
            if let Some(f) = resolve_field(name) {
                if !fields.contains(&f) {
                    fields.push(f);
                }
            }
        }
        Deployed { id, rule, fields }
    }

    fn derived(&self, ts: i64, patient: &str, values: BTreeMap<String, f64>) -> DerivedEvent {
        DerivedEvent { ts, patient: patient.to_string(), label: self.rule.label.clone(), rule: self.id.clone(), values }
    }

    fn close_windows(&self, st: &mut RuleState, patient: &str, upto: Option<i64>, out: &mut Vec<DerivedEvent>) {
        let spec = self.rule.window.expect("windowed rule");
        let field = &self.rule.condition.field;
        while let Some((&start, _)) = st.windows.first_key_value() {
            let end = start + spec.length_ms;
            if upto.is_some_and(|ts| end > ts) {
                break;
            }
            let acc = st.windows.remove(&start).expect("key just seen");
            let means: BTreeMap<String, f64> =
                acc.sums.iter().map(|(k, s)| (k.clone(), s / acc.count as f64)).collect();
            let Some(&mean) = means.get(field) else { continue };
            if let Some(t) = st.threshold_then_record(&self.rule.condition.threshold, mean) {
                if self.rule.condition.op.holds(mean, t) {
                    out.push(self.derived(end, patient, means));
                }
            }
        }
    }
}

impl CepEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_rules(rules: Vec<Rule>) -> Result<Self, CepError> {
        let engine = Self::new();
        engine.deploy_all(rules)?;
        Ok(engine)
    }

    fn snapshot(&self) -> Arc<Vec<Arc<Deployed>>> {
        self.rules.read().expect("rule lock poisoned").clone()
    }

    /// Ids of deployed rules, in deployment order.
    pub fn rule_ids(&self) -> Vec<String> {
        self.snapshot().iter().map(|d| d.id.clone()).collect()
    }

    pub fn rule(&self, id: &str) -> Option<Rule> {
        self.snapshot().iter().find(|d| d.id == id).map(|d| d.rule.clone())
    }

    /// Deploys one rule and returns its id with the time the deployment took.
    pub fn deploy(&self, rule: Rule) -> Result<(String, Duration), CepError> {
        let start = Instant::now();
        let mut ids = self.deploy_all(vec![rule])?;
        Ok((ids.pop().expect("one rule deployed"), start.elapsed()))
    }

    /// Deploys several rules in one step: no event sees only part of them.
    /// Rules without an id get `rule-<n>`.
    pub fn deploy_all(&self, rules: Vec<Rule>) -> Result<Vec<String>, CepError> {
        let mut guard = self.rules.write().expect("rule lock poisoned");
        let mut next: Vec<Arc<Deployed>> = guard.as_ref().clone();
        let mut ids = Vec::with_capacity(rules.len());
        for rule in rules {
            let id = match &rule.id {
                Some(id) => id.clone(),
                None => loop {
                    let candidate = format!("rule-{}", self.auto_id.fetch_add(1, Ordering::Relaxed) + 1);
                    if !next.iter().any(|d| d.id == candidate) {
                        break candidate;
                    }
                },
            };
            if next.iter().any(|d| d.id == id) {
                return Err(CepError::DuplicateRule(id));
            }
            ids.push(id.clone());
            next.push(Arc::new(Deployed::new(id, rule)));
        }
        *guard = Arc::new(next);
        Ok(ids)
    }

    /// Evaluates every deployed rule on the event. All matching rules fire.
    pub fn ingest(&self, event: &VitalEvent) -> Result<Vec<DerivedEvent>, CepError> {
        let mut state = self.state.lock().expect("engine state poisoned");
        if let Some(&last) = state.last_ts.get(&event.patient) {
            if event.ts < last {
                return Err(CepError::OutOfOrder { patient: event.patient.clone(), ts: event.ts, last });
            }
        }
        let rules = self.snapshot();
        let mut out = Vec::new();
        for d in rules.iter() {
            let st = state.per_rule.entry((d.id.clone(), event.patient.clone())).or_default();
            match d.rule.window {
                None => {
                    let Some(value) = event.get(&d.rule.condition.field) else { continue };
                    let Some(t) = st.threshold_then_record(&d.rule.condition.threshold, value) else { continue };
                    if d.rule.condition.op.holds(value, t) {
                        let values = d.fields.iter().filter_map(|f| event.get(f).map(|v| (f.clone(), v))).collect();
                        out.push(d.derived(event.ts, &event.patient, values));
                    }
                }
                Some(spec) => {
                    d.close_windows(st, &event.patient, Some(event.ts), &mut out);
                    if event.get(&d.rule.condition.field).is_none() {
                        continue;
                    }
                    for start in spec.starts_containing(event.ts) {
                        let acc = st.windows.entry(start).or_default();
                        acc.count += 1;
                        for f in &d.fields {
                            if let Some(v) = event.get(f) {
                                *acc.sums.entry(f.clone()).or_default() += v;
                            }
                        }
                    }
                }
            }
        }
        state.last_ts.insert(event.patient.clone(), event.ts);
        Ok(out)
    }

    /// Closes every open window (end of stream).
    pub fn flush(&self) -> Vec<DerivedEvent> {
        let mut state = self.state.lock().expect("engine state poisoned");
        let rules = self.snapshot();
        let mut out = Vec::new();
        for d in rules.iter().filter(|d| d.rule.window.is_some()) {
            for ((rule_id, patient), st) in state.per_rule.iter_mut() {
                if *rule_id == d.id {
                    d.close_windows(st, patient, None, &mut out);
                }
            }
        }
        out
    }

    /// Ingests a whole stream and flushes windows at the end.
    pub fn run(&self, events: &[VitalEvent]) -> Result<Vec<DerivedEvent>, CepError> {
        let mut out = Vec::new();
        for e in events {
            out.extend(self.ingest(e)?);
        }
        out.extend(self.flush());
        Ok(out)
    }
}

/// Windowed AND over derived streams: emits `label` whenever an event of one
/// input label arrives within `within_ms` after an event of the other for
/// the same patient. Input must be in time order.
pub fn correlate(
    derived: &[DerivedEvent],
    first: &str,
    second: &str,
    within_ms: i64,
    label: &str,
) -> Vec<DerivedEvent> {
    let mut last: HashMap<(&str, &str), &DerivedEvent> = HashMap::new();
    let mut out = Vec::new();
    for d in derived {
        let other = if d.label == first {
            second
        } else if d.label == second {
            first
        } else {
            continue;
        };
        if let Some(prev) = last.get(&(d.patient.as_str(), other)) {
            if d.ts - prev.ts <= within_ms {
                let mut values = prev.values.clone();
                values.extend(d.values.iter().map(|(k, v)| (k.clone(), *v)));
                out.push(DerivedEvent {
                    ts: d.ts,
                    patient: d.patient.clone(),
                    label: label.to_string(),
                    rule: format!("correlate({first},{second})"),
                    values,
                });
            }
        }
        last.insert((d.patient.as_str(), d.label.as_str()), d);
    }
    out
}
