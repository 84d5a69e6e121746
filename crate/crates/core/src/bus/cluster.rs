use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::rdf::fnv1a;

use super::BusError;

/// Broker ids print as letters: 0 is A, 1 is B, 26 is A1.
pub fn broker_name(id: usize) -> String {
    let letter = char::from(b'A' + (id % 26) as u8);
    if id < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", id / 26)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub name: String,
    pub partitions: usize,
    pub replication: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub key: Option<Vec<u8>>,
    pub payload: Vec<u8>,
}

/// A fetched record with its coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivered {
    pub partition: usize,
    pub offset: u64,
    pub record: Record,
}

/// Next offset to read per partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsumerPosition {
    pub group: String,
    pub topic: String,
    pub next: Vec<u64>,
}

#[derive(Debug)]
struct Partition {
    replicas: Vec<usize>,
    /// In-sync replicas. A failed broker leaves the set unless it is the
    /// last member, so the set always names a broker holding every
    /// acknowledged record.
    isr: Vec<usize>,
    logs: BTreeMap<usize, Vec<Record>>,
}

#[derive(Debug)]
struct TopicState {
    topic: Topic,
    partitions: Vec<Partition>,
    round_robin: usize,
}

#[derive(Debug)]
struct Inner {
    alive: Vec<bool>,
    topics: BTreeMap<String, TopicState>,
    committed: BTreeMap<(String, String), Vec<u64>>,
}

/// A set of brokers hosting topics. Every operation holds one lock, so
/// appends serialize and each call observes a consistent cluster state.
#[derive(Debug)]
pub struct Cluster {
    inner: Mutex<Inner>,
}

impl Partition {
    fn leader(&self, alive: &[bool]) -> Option<usize> {
        self.isr.iter().copied().filter(|b| alive[*b]).min()
    }

    fn leader_log(&self, alive: &[bool]) -> Option<&Vec<Record>> {
        self.leader(alive).map(|l| &self.logs[&l])
    }

    /// Brings live replicas outside the ISR up to the leader's log.
    fn reconcile(&mut self, alive: &[bool]) {
        let Some(leader) = self.leader(alive) else { return };
        let log = self.logs[&leader].clone();
        for &r in &self.replicas {
            if alive[r] && !self.isr.contains(&r) {
                self.logs.insert(r, log.clone());
                self.isr.push(r);
            }
        }
        self.isr.sort_unstable();
    }
}

impl Cluster {
    pub fn new(brokers: usize) -> Result<Self, BusError> {
        if brokers == 0 {
            return Err(BusError::InvalidConfig("need at least one broker".into()));
        }
        Ok(Cluster {
            inner: Mutex::new(Inner {
                alive: vec![true; brokers],
                topics: BTreeMap::new(),
                committed: BTreeMap::new(),
            }),
        })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().expect("cluster lock poisoned")
    }

    pub fn brokers(&self) -> usize {
        self.lock().alive.len()
    }

    pub fn is_alive(&self, broker: usize) -> bool {
        self.lock().alive.get(broker).copied().unwrap_or(false)
    }

    /// Replicas of partition `p` sit on brokers `p, p+1, ..., p+r-1` (mod n).
    pub fn create_topic(&self, name: &str, partitions: usize, replication: usize) -> Result<Topic, BusError> {
        let mut inner = self.lock();
        let n = inner.alive.len();
        if partitions == 0 {
            return Err(BusError::InvalidConfig("a topic needs at least one partition".into()));
        }
        if replication == 0 || replication > n {
            return Err(BusError::InvalidConfig(format!("replication {replication} outside 1..={n}")));
        }
        if inner.topics.contains_key(name) {
            return Err(BusError::TopicExists(name.to_string()));
        }
        let alive = inner.alive.clone();
        let parts = (0..partitions)
            .map(|p| {
                let replicas: Vec<usize> = (0..replication).map(|j| (p + j) % n).collect();
                let mut isr: Vec<usize> = replicas.iter().copied().filter(|b| alive[*b]).collect();
                if isr.is_empty() {
                    isr.push(replicas[0]);
                }
                isr.sort_unstable();
                let logs = replicas.iter().map(|r| (*r, Vec::new())).collect();
                Partition { replicas, isr, logs }
            })
            .collect();
        let topic = Topic { name: name.to_string(), partitions, replication };
        inner.topics.insert(name.to_string(), TopicState { topic: topic.clone(), partitions: parts, round_robin: 0 });
        Ok(topic)
    }

    /// Appends to every live in-sync replica before acknowledging. Keyed
    /// records go to `fnv1a(key) mod partitions`; keyless ones rotate.
    pub fn produce(&self, topic: &str, key: Option<&[u8]>, payload: &[u8]) -> Result<(usize, u64), BusError> {
        let mut inner = self.lock();
        let Inner { alive, topics, .. } = &mut *inner;
        let t = topics.get_mut(topic).ok_or_else(|| BusError::UnknownTopic(topic.to_string()))?;
        let n = t.partitions.len();
        let partition = match key {
            Some(k) => (fnv1a(k) % n as u64) as usize,
            None => {
                t.round_robin = (t.round_robin + 1) % n;
                (t.round_robin + n - 1) % n
            }
        };
        let part = &mut t.partitions[partition];
        let leader = part.leader(alive).ok_or_else(|| BusError::Unavailable { topic: topic.to_string(), partition })?;
        let offset = part.logs[&leader].len() as u64;
        let record = Record { key: key.map(<[u8]>::to_vec), payload: payload.to_vec() };
        for b in part.isr.clone() {
            if alive[b] {
                part.logs.get_mut(&b).expect("replica log").push(record.clone());
            }
        }
        Ok((partition, offset))
    }

    pub fn fail_broker(&self, broker: usize) -> Result<(), BusError> {
        let mut inner = self.lock();
        let Inner { alive, topics, .. } = &mut *inner;
        if broker >= alive.len() {
            return Err(BusError::UnknownBroker(broker));
        }
        alive[broker] = false;
        for t in topics.values_mut() {
            for p in &mut t.partitions {
                if p.isr.len() > 1 {
                    p.isr.retain(|b| *b != broker);
                }
            }
        }
        Ok(())
    }

    /// Marks the broker live; its replicas copy the leader's log and rejoin
    /// the in-sync set wherever a live leader exists.
    pub fn recover_broker(&self, broker: usize) -> Result<(), BusError> {
        let mut inner = self.lock();
        let Inner { alive, topics, .. } = &mut *inner;
        if broker >= alive.len() {
            return Err(BusError::UnknownBroker(broker));
        }
        alive[broker] = true;
        for t in topics.values_mut() {
            for p in &mut t.partitions {
                p.reconcile(alive);
            }
        }
        Ok(())
    }

    pub fn topic(&self, topic: &str) -> Result<Topic, BusError> {
        let inner = self.lock();
        inner.topics.get(topic).map(|t| t.topic.clone()).ok_or_else(|| BusError::UnknownTopic(topic.to_string()))
    }

    /// Current leader per partition, `None` where unavailable.
    pub fn leaders(&self, topic: &str) -> Result<Vec<Option<usize>>, BusError> {
        let inner = self.lock();
        let t = inner.topics.get(topic).ok_or_else(|| BusError::UnknownTopic(topic.to_string()))?;
        Ok(t.partitions.iter().map(|p| p.leader(&inner.alive)).collect())
    }

    /// Log end offset per partition, as seen by the leader.
    pub fn end_offsets(&self, topic: &str) -> Result<Vec<Option<u64>>, BusError> {
        let inner = self.lock();
        let t = inner.topics.get(topic).ok_or_else(|| BusError::UnknownTopic(topic.to_string()))?;
        Ok(t.partitions.iter().map(|p| p.leader_log(&inner.alive).map(|l| l.len() as u64)).collect())
    }

    /// True when every live in-sync replica of every partition holds the
    /// same log.
    pub fn replicas_consistent(&self, topic: &str) -> Result<bool, BusError> {
        let inner = self.lock();
        let t = inner.topics.get(topic).ok_or_else(|| BusError::UnknownTopic(topic.to_string()))?;
        Ok(t.partitions.iter().all(|p| {
            let mut live = p.isr.iter().filter(|b| inner.alive[**b]).map(|b| &p.logs[b]);
            match live.next() {
                Some(first) => live.all(|l| l == first),
                None => true,
            }
        }))
    }

    /// Saved position of a group, zeros when it has never committed.
    pub fn committed(&self, group: &str, topic: &str) -> Result<ConsumerPosition, BusError> {
        let inner = self.lock();
        let t = inner.topics.get(topic).ok_or_else(|| BusError::UnknownTopic(topic.to_string()))?;
        let next = inner
            .committed
            .get(&(group.to_string(), topic.to_string()))
            .cloned()
            .unwrap_or_else(|| vec![0; t.partitions.len()]);
        Ok(ConsumerPosition { group: group.to_string(), topic: topic.to_string(), next })
    }

    pub fn commit(&self, position: &ConsumerPosition) -> Result<(), BusError> {
        let mut inner = self.lock();
        let t = inner.topics.get(&position.topic).ok_or_else(|| BusError::UnknownTopic(position.topic.clone()))?;
        if position.next.len() != t.partitions.len() {
            return Err(BusError::InvalidConfig("position does not match the partition count".into()));
        }
        inner.committed.insert((position.group.clone(), position.topic.clone()), position.next.clone());
        Ok(())
    }

    /// Reads up to `max` records from `position`, one partition at a time
    /// in rotation, without committing. Unavailable partitions are skipped.
    pub fn fetch(
        &self,
        position: &ConsumerPosition,
        max: usize,
    ) -> Result<(Vec<Delivered>, ConsumerPosition), BusError> {
        let inner = self.lock();
        let t = inner.topics.get(&position.topic).ok_or_else(|| BusError::UnknownTopic(position.topic.clone()))?;
        if position.next.len() != t.partitions.len() {
            return Err(BusError::InvalidConfig("position does not match the partition count".into()));
        }
        let logs: Vec<Option<&Vec<Record>>> = t.partitions.iter().map(|p| p.leader_log(&inner.alive)).collect();
        let mut next = position.next.clone();
        let mut out = Vec::new();
        let mut progressed = true;
        while out.len() < max && progressed {
            progressed = false;
            for (p, log) in logs.iter().enumerate() {
                if out.len() >= max {
                    break;
                }
                let Some(log) = log else { continue };
                if let Some(record) = log.get(next[p] as usize) {
                    out.push(Delivered { partition: p, offset: next[p], record: record.clone() });
                    next[p] += 1;
                    progressed = true;
                }
            }
        }
        Ok((out, ConsumerPosition { next, ..position.clone() }))
    }

    /// Fetches from the group's committed position and commits the advance.
    pub fn consume(&self, group: &str, topic: &str, max: usize) -> Result<Vec<Delivered>, BusError> {
        let pos = self.committed(group, topic)?;
        let (records, next) = self.fetch(&pos, max)?;
        self.commit(&next)?;
        Ok(records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cluster(n: usize, parts: usize, r: usize) -> Cluster {
        let c = Cluster::new(n).unwrap();
        c.create_topic("t", parts, r).unwrap();
        c
    }

    #[test]
    fn offsets_and_key_affinity() {
        let c = cluster(3, 3, 3);
        let (p1, o1) = c.produce("t", Some(b"k"), b"a").unwrap();
        let (p2, o2) = c.produce("t", Some(b"k"), b"b").unwrap();
        assert_eq!((p1, o1, o2), (p2, 0, 1));
        assert!(matches!(c.produce("nope", None, b"x"), Err(BusError::UnknownTopic(_))));
    }

    #[test]
    fn keyless_round_robin_balanced() {
        let c = cluster(3, 3, 2);
        let mut counts = [0usize; 3];
        for i in 0..1000 {
            counts[c.produce("t", None, format!("{i}").as_bytes()).unwrap().0] += 1;
        }
        assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
    }

    #[test]
    fn consume_replay_and_groups() {
        let c = cluster(3, 1, 3);
        for i in 0..3 {
            c.produce("t", None, &[i]).unwrap();
        }
        let pos = c.committed("g", "t").unwrap();
        let (a, _) = c.fetch(&pos, 10).unwrap();
        let (b, _) = c.fetch(&pos, 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|d| d.offset).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(c.consume("g1", "t", 10).unwrap().len(), 3);
        assert_eq!(c.consume("g2", "t", 10).unwrap().len(), 3);
        assert!(c.consume("g1", "t", 10).unwrap().is_empty());
    }

    #[test]
    fn failover_keeps_acknowledged_records() {
        let c = cluster(3, 3, 3);
        for i in 0..1000u32 {
            if i == 300 {
                c.fail_broker(0).unwrap();
            }
            c.produce("t", None, &i.to_be_bytes()).unwrap();
        }
        assert_eq!(c.leaders("t").unwrap(), vec![Some(1), Some(1), Some(1)]);
        let got = c.consume("g", "t", 5000).unwrap();
        assert_eq!(got.len(), 1000);
        let mut seen: Vec<u32> =
            got.iter().map(|d| u32::from_be_bytes(d.record.payload[..].try_into().unwrap())).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..1000).collect::<Vec<_>>());
        c.recover_broker(0).unwrap();
        assert!(c.replicas_consistent("t").unwrap());
        assert_eq!(c.leaders("t").unwrap(), vec![Some(0), Some(0), Some(0)]);
    }

    #[test]
    fn single_replica_unavailable() {
        let c = cluster(3, 1, 1);
        c.fail_broker(0).unwrap();
        assert!(matches!(c.produce("t", None, b"x"), Err(BusError::Unavailable { partition: 0, .. })));
        assert!(c.consume("g", "t", 10).unwrap().is_empty());
    }

    #[test]
    fn fail_recover_without_writes_is_identity() {
        let c = cluster(3, 2, 3);
        for i in 0..10u8 {
            c.produce("t", None, &[i]).unwrap();
        }
        let before = c.fetch(&c.committed("g", "t").unwrap(), 100).unwrap().0;
        c.fail_broker(1).unwrap();
        c.recover_broker(1).unwrap();
        assert_eq!(c.fetch(&c.committed("g", "t").unwrap(), 100).unwrap().0, before);
        assert!(c.replicas_consistent("t").unwrap());
    }

    #[test]
    fn last_replica_down_then_back() {
        let c = cluster(3, 1, 3);
        c.produce("t", None, b"a").unwrap();
        c.fail_broker(0).unwrap();
        c.produce("t", None, b"b").unwrap();
        c.fail_broker(1).unwrap();
        c.produce("t", None, b"c").unwrap();
        c.fail_broker(2).unwrap();
        assert!(c.produce("t", None, b"d").is_err());
        // the stale brokers come back first and must not lead
        c.recover_broker(0).unwrap();
        c.recover_broker(1).unwrap();
        assert!(c.produce("t", None, b"d").is_err());
        c.recover_broker(2).unwrap();
        let got: Vec<Vec<u8>> = c.consume("g", "t", 10).unwrap().into_iter().map(|d| d.record.payload).collect();
        assert_eq!(got, vec![b"a".to_vec(), b"b".to_vec(), b"c".to_vec()]);
        assert!(c.replicas_consistent("t").unwrap());
    }

    #[test]
    fn config_validation() {
        let c = Cluster::new(3).unwrap();
        assert!(c.create_topic("t", 0, 1).is_err());
        assert!(c.create_topic("t", 1, 4).is_err());
        assert!(c.create_topic("t", 1, 0).is_err());
        c.create_topic("t", 1, 1).unwrap();
        assert!(matches!(c.create_topic("t", 1, 1), Err(BusError::TopicExists(_))));
        assert!(Cluster::new(0).is_err());
        assert_eq!(broker_name(2), "C");
    }
}
