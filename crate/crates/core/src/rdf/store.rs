use std::collections::{HashMap, HashSet};

use super::term::{Term, Triple};
use super::RdfError;

/// Indexed in-memory triple set.
///
/// Every triple is reachable through the subject, predicate and object
/// indexes. Inserting a triple that is already present is a no-op.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    triples: Vec<Triple>,
    seen: HashSet<Triple>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
    chunk_id: Option<usize>,
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` if the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.seen.contains(&triple) {
            return false;
        }
        let idx = self.triples.len();
        self.by_subject.entry(triple.subject.clone()).or_default().push(idx);
        self.by_predicate.entry(triple.predicate.clone()).or_default().push(idx);
        self.by_object.entry(triple.object.clone()).or_default().push(idx);
        self.seen.insert(triple.clone());
        self.triples.push(triple);
        true
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.seen.contains(triple)
    }

    /// Triples in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn chunk_id(&self) -> Option<usize> {
        self.chunk_id
    }

    pub fn subjects(&self) -> impl Iterator<Item = &Term> {
        self.by_subject.keys()
    }

    /// Triples agreeing with every bound position, using the smallest
    /// applicable index.
    pub fn matching(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<&Triple> {
        let candidates =
            [s.map(|t| self.by_subject.get(t)), p.map(|t| self.by_predicate.get(t)), o.map(|t| self.by_object.get(t))];
        let mut best: Option<&Vec<usize>> = None;
        for bound in candidates.into_iter().flatten() {
            match bound {
                None => return Vec::new(),
                Some(list) => {
                    if best.is_none_or(|b| list.len() < b.len()) {
                        best = Some(list);
                    }
                }
            }
        }
        let accept = |t: &Triple| {
            s.is_none_or(|s| &t.subject == s) && p.is_none_or(|p| &t.predicate == p) && o.is_none_or(|o| &t.object == o)
        };
        match best {
            Some(list) => list.iter().map(|&i| &self.triples[i]).filter(|t| accept(t)).collect(),
            None => self.triples.iter().collect(),
        }
    }

    /// Set equality, ignoring insertion order.
    pub fn same_triples(&self, other: &TripleStore) -> bool {
        self.len() == other.len() && self.triples.iter().all(|t| other.contains(t))
    }
}

impl FromIterator<Triple> for TripleStore {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut store = TripleStore::new();
        store.extend(iter);
        store
    }
}

impl Extend<Triple> for TripleStore {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionStrategy {
    SubjectHash,
}

/// A store split into `k` disjoint, subject-colocated chunks.
#[derive(Debug, Clone)]
pub struct ChunkedStore {
    chunks: Vec<TripleStore>,
    strategy: PartitionStrategy,
}

impl ChunkedStore {
    pub fn from_chunks(chunks: Vec<TripleStore>) -> Self {
        ChunkedStore { chunks, strategy: PartitionStrategy::SubjectHash }
    }

    pub fn k(&self) -> usize {
        self.chunks.len()
    }

    pub fn chunks(&self) -> &[TripleStore] {
        &self.chunks
    }

    pub fn strategy(&self) -> PartitionStrategy {
        self.strategy
    }

    pub fn total_len(&self) -> usize {
        self.chunks.iter().map(TripleStore::len).sum()
    }

    /// Sub-store made of the chunks at the given zero-based indexes.
    pub fn select(&self, indexes: &[usize]) -> Result<ChunkedStore, RdfError> {
        let mut picked = Vec::with_capacity(indexes.len());
        for &i in indexes {
            let chunk = self
                .chunks
                .get(i)
                .ok_or_else(|| RdfError::InvalidArgument(format!("chunk {} out of range (k={})", i + 1, self.k())))?;
            picked.push(chunk.clone());
        }
        Ok(ChunkedStore { chunks: picked, strategy: self.strategy })
    }

    /// Union of the chunks at the given zero-based indexes.
    pub fn merge(&self, indexes: &[usize]) -> Result<TripleStore, RdfError> {
        Ok(merge(self.select(indexes)?.chunks.iter()))
    }

    pub fn merge_all(&self) -> TripleStore {
        merge(self.chunks.iter())
    }
}

/// Union of the given chunks.
pub fn merge<'a>(chunks: impl IntoIterator<Item = &'a TripleStore>) -> TripleStore {
    chunks.into_iter().flat_map(|c| c.iter().cloned()).collect()
}

/// Splits a store into `k` chunks by `hash(subject) mod k`.
pub fn partition(store: &TripleStore, k: usize) -> Result<ChunkedStore, RdfError> {
    if k == 0 {
        return Err(RdfError::InvalidArgument("chunk count must be at least 1".into()));
    }
    let mut chunks: Vec<TripleStore> =
        (0..k).map(|i| TripleStore { chunk_id: Some(i), ..TripleStore::default() }).collect();
    for triple in store.iter() {
        let slot = subject_slot(&triple.subject, k);
        chunks[slot].insert(triple.clone());
    }
    Ok(ChunkedStore { chunks, strategy: PartitionStrategy::SubjectHash })
}

pub(crate) fn subject_slot(subject: &Term, k: usize) -> usize {
    (fnv1a(subject.to_ntriples().as_bytes()) % k as u64) as usize
}

/// 64-bit FNV-1a; stable across platforms and releases.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
