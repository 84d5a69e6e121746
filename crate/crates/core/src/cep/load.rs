use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use super::rules::{Comparator, Rule};
use super::{CepEngine, CepError, VitalEvent};

#[derive(Debug, Clone, PartialEq)]
pub struct LoadConfig {
    /// Target event rates, events per second. 0 means idle.
    pub tiers: Vec<u64>,
    /// Rules deployed one after another at every tier.
    pub rules: Vec<Rule>,
    /// How long background load runs before the first deployment.
    pub warmup: Duration,
}

impl LoadConfig {
    pub fn new(rules: Vec<Rule>) -> Self {
        LoadConfig { tiers: vec![0, 8_000, 16_000, 32_000, 48_000], rules, warmup: Duration::from_millis(50) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeployRecord {
    pub rule: String,
    pub load_eps: u64,
    pub deploy_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub records: Vec<DeployRecord>,
    /// Events ingested per tier while deployments ran.
    pub events: Vec<(u64, usize)>,
    /// Events that saw one half of an atomically deployed rule pair.
    pub atomicity_violations: usize,
}

impl LoadReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rule,load_eps,deploy_seconds\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{:.6}\n", r.rule, r.load_eps, r.deploy_seconds));
        }
        out
    }
}

const PROBE_A: &str = "__probe_a";
const PROBE_B: &str = "__probe_b";

/// Deploys every configured rule into a fresh engine at each load tier while
/// a background thread ingests events at the tier's rate. A pair of probe
/// rules with identical conditions is deployed in one step; the load thread
/// checks that no event fires exactly one of them.
pub fn deploy_under_load(config: &LoadConfig) -> Result<LoadReport, CepError> {
    let mut records = Vec::new();
    let mut events = Vec::new();
    let violations = AtomicUsize::new(0);
    for &eps in &config.tiers {
        let engine = CepEngine::new();
        let stop = AtomicBool::new(false);
        let ingested = AtomicUsize::new(0);
        let tier_records = std::thread::scope(|scope| -> Result<Vec<DeployRecord>, CepError> {
            if eps > 0 {
                scope.spawn(|| {
                    let start = Instant::now();
                    let mut sent: u64 = 0;
                    while !stop.load(Ordering::Relaxed) {
                        let due = (start.elapsed().as_secs_f64() * eps as f64) as u64;
                        if sent >= due {
                            std::thread::sleep(Duration::from_micros(500));
                            continue;
                        }
                        let ev = VitalEvent::new(
                            sent as i64,
                            &format!("L{}", sent % 64),
                            &[("hr", 60.0 + (sent % 90) as f64)],
                        );
                        let fired = engine.ingest(&ev).expect("load events are in order");
                        let a = fired.iter().filter(|d| d.rule == PROBE_A).count();
                        let b = fired.iter().filter(|d| d.rule == PROBE_B).count();
                        if a != b {
                            violations.fetch_add(1, Ordering::Relaxed);
                        }
                        sent += 1;
                        ingested.fetch_add(1, Ordering::Relaxed);
                    }
                });
            }
            std::thread::sleep(config.warmup);
            let mut out = Vec::new();
            let result = (|| {
                for rule in &config.rules {
                    let (id, latency) = engine.deploy(rule.clone())?;
                    out.push(DeployRecord { rule: id, load_eps: eps, deploy_seconds: latency.as_secs_f64() });
                }
                let probes = [PROBE_A, PROBE_B]
                    .iter()
                    .map(|id| Rule::simple(id, "hr", Comparator::Gt, 0.0, id))
                    .collect::<Result<Vec<_>, _>>()?;
                engine.deploy_all(probes)?;
                std::thread::sleep(config.warmup);
                Ok(())
            })();
            stop.store(true, Ordering::Relaxed);
            result.map(|()| out)
        })?;
        records.extend(tier_records);
        events.push((eps, ingested.load(Ordering::Relaxed)));
    }
    Ok(LoadReport { records, events, atomicity_violations: violations.into_inner() })
}
