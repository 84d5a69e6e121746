use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{broker_name, BusError, Cluster};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoConfig {
    pub brokers: usize,
    pub replication: usize,
    pub partitions: usize,
    pub events: usize,
    /// Broker failed after a third of the events and recovered after two
    /// thirds.
    pub fail: Option<usize>,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig { brokers: 3, replication: 3, partitions: 3, events: 1000, fail: Some(0) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoReport {
    pub acknowledged: usize,
    /// Produce calls refused because the partition had no live replica.
    pub unavailable: usize,
    pub delivered: usize,
    pub lost: usize,
    pub duplicates: usize,
    pub fifo: bool,
    pub replicas_consistent: bool,
    pub timeline: Vec<String>,
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.timeline {
            writeln!(f, "{line}")?;
        }
        writeln!(f, "acknowledged {}", self.acknowledged)?;
        writeln!(f, "unavailable  {}", self.unavailable)?;
        writeln!(f, "delivered    {}", self.delivered)?;
        writeln!(f, "lost         {}", self.lost)?;
        writeln!(f, "duplicates   {}", self.duplicates)?;
        writeln!(f, "fifo         {}", if self.fifo { "ok" } else { "VIOLATED" })?;
        write!(f, "replicas     {}", if self.replicas_consistent { "consistent" } else { "DIVERGED" })
    }
}

fn leaders_line(cluster: &Cluster, topic: &str) -> Result<String, BusError> {
    let leaders: Vec<String> = cluster
        .leaders(topic)?
        .iter()
        .enumerate()
        .map(|(p, l)| format!("p{p}={}", l.map_or("-".to_string(), broker_name)))
        .collect();
    Ok(leaders.join(" "))
}

/// Streams `events` N-Triples records through a fresh cluster, optionally
/// failing and recovering one broker, then consumes everything and checks
/// delivery against the acknowledgements.
pub fn run_demo(config: &DemoConfig) -> Result<DemoReport, BusError> {
    let cluster = Cluster::new(config.brokers)?;
    let topic = "ppg-rdf";
    cluster.create_topic(topic, config.partitions, config.replication)?;
    if let Some(b) = config.fail {
        if b >= config.brokers {
            return Err(BusError::UnknownBroker(b));
        }
    }
    let mut timeline = vec![format!("start   leaders {}", leaders_line(&cluster, topic)?)];
    let mut acked: BTreeMap<usize, Vec<Vec<u8>>> = BTreeMap::new();
    let mut unavailable = 0;
    for i in 0..config.events {
        if let Some(b) = config.fail {
            if i == config.events / 3 {
                cluster.fail_broker(b)?;
                timeline.push(format!(
                    "event {i}: broker {} failed, leaders {}",
                    broker_name(b),
                    leaders_line(&cluster, topic)?
                ));
            }
            if i == 2 * config.events / 3 {
                cluster.recover_broker(b)?;
                timeline.push(format!(
                    "event {i}: broker {} recovered, leaders {}",
                    broker_name(b),
                    leaders_line(&cluster, topic)?
                ));
            }
        }
        let payload = format!(
            "<http://healthcare.org/ppg/Time_demo_{i}> <http://healthcare.org/ppg/hasHR> \"{}\"^^<http://www.w3.org/2001/XMLSchema#integer> .",
            60 + i % 60
        );
        match cluster.produce(topic, None, payload.as_bytes()) {
            Ok((p, _)) => acked.entry(p).or_default().push(payload.into_bytes()),
            Err(BusError::Unavailable { .. }) => unavailable += 1,
            Err(e) => return Err(e),
        }
    }

    let delivered = cluster.consume("demo", topic, usize::MAX)?;
    let mut per_partition: BTreeMap<usize, Vec<Vec<u8>>> = BTreeMap::new();
    let mut fifo = true;
    for d in &delivered {
        let got = per_partition.entry(d.partition).or_default();
        fifo &= d.offset == got.len() as u64;
        got.push(d.record.payload.clone());
    }
    fifo &= per_partition.iter().all(|(p, got)| acked.get(p).is_some_and(|a| a.starts_with(got) || got.starts_with(a)));
    let acked_set: BTreeSet<&Vec<u8>> = acked.values().flatten().collect();
    let delivered_set: BTreeSet<&Vec<u8>> = delivered.iter().map(|d| &d.record.payload).collect();
    let acknowledged = acked.values().map(Vec::len).sum();
    timeline.push(format!("end     leaders {}", leaders_line(&cluster, topic)?));
    Ok(DemoReport {
        acknowledged,
        unavailable,
        delivered: delivered.len(),
        lost: acked_set.difference(&delivered_set).count(),
        duplicates: delivered.len() - delivered_set.len(),
        fifo,
        replicas_consistent: cluster.replicas_consistent(topic)?,
        timeline,
    })
}
