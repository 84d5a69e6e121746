use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::rdf::parse_ntriples;

use super::{BusError, Cluster, ConsumerPosition};

/// Where an injected crash interrupts a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailPoint {
    BeforeFileWrite,
    /// After half of the batch's lines reach the file.
    MidFileWrite,
    AfterFileWrite,
    AfterManifestPersist,
}

/// Sidecar state committed after each batch: consumer position and the
/// byte lengths of the output and dead-letter files at that point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub topic: String,
    pub next: Vec<u64>,
    pub file_len: u64,
    pub dlq_len: u64,
    pub batches: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SinkBatch {
    pub written: usize,
    pub dead_lettered: usize,
}

/// Appends N-Triples payloads from a topic to a file. Output and position
/// commit together through the manifest: on open, both files are cut back
/// to the lengths the manifest recorded, so a crash mid-batch replays the
/// batch without duplicating lines.
#[derive(Debug)]
pub struct FileSink {
    target: PathBuf,
    manifest_path: PathBuf,
    dlq_path: PathBuf,
    manifest: Manifest,
    fail_point: Option<FailPoint>,
}

fn sidecar(target: &Path, ext: &str) -> PathBuf {
    let mut name = target.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(ext);
    target.with_file_name(name)
}

fn truncate_to(path: &Path, len: u64) -> Result<(), BusError> {
    let f = OpenOptions::new().create(true).write(true).truncate(false).open(path)?;
    let actual = f.metadata()?.len();
    if actual < len {
        return Err(BusError::Manifest(format!(
            "{} is shorter ({actual} bytes) than committed ({len} bytes)",
            path.display()
        )));
    }
    f.set_len(len)?;
    f.sync_all()?;
    Ok(())
}

fn is_statement(payload: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(payload) else { return false };
    let text = text.trim_end_matches(['\n', '\r']);
    !text.contains('\n') && matches!(parse_ntriples(text), Ok(t) if t.len() == 1)
}

impl FileSink {
    /// Opens (or recovers) the sink for `topic` writing to `target`.
    pub fn open(cluster: &Cluster, topic: &str, target: impl Into<PathBuf>) -> Result<Self, BusError> {
        let target = target.into();
        let manifest_path = sidecar(&target, ".manifest");
        let dlq_path = sidecar(&target, ".dlq");
        let partitions = cluster.topic(topic)?.partitions;
        let manifest = match fs::read_to_string(&manifest_path) {
            Ok(text) => {
                let m: Manifest = serde_json::from_str(&text).map_err(|e| BusError::Manifest(e.to_string()))?;
                if m.topic != topic || m.next.len() != partitions {
                    return Err(BusError::Manifest(format!("manifest belongs to another topic layout ({})", m.topic)));
                }
                m
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Manifest { topic: topic.to_string(), next: vec![0; partitions], file_len: 0, dlq_len: 0, batches: 0 }
            }
            Err(e) => return Err(e.into()),
        };
        truncate_to(&target, manifest.file_len)?;
        truncate_to(&dlq_path, manifest.dlq_len)?;
        Ok(FileSink { target, manifest_path, dlq_path, manifest, fail_point: None })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn target(&self) -> &Path {
        &self.target
    }

    pub fn dead_letter_path(&self) -> &Path {
        &self.dlq_path
    }

    pub fn position(&self, group: &str) -> ConsumerPosition {
        ConsumerPosition {
            group: group.to_string(),
            topic: self.manifest.topic.clone(),
            next: self.manifest.next.clone(),
        }
    }

    /// Arms a one-shot crash for the next batch.
    pub fn inject(&mut self, point: FailPoint) {
        self.fail_point = Some(point);
    }

    fn crash_at(&mut self, point: FailPoint) -> Result<(), BusError> {
        if self.fail_point == Some(point) {
            self.fail_point = None;
            return Err(BusError::InjectedCrash(point));
        }
        Ok(())
    }

    fn persist_manifest(&self) -> Result<(), BusError> {
        let tmp = sidecar(&self.manifest_path, ".tmp");
        let mut f = File::create(&tmp)?;
        f.write_all(serde_json::to_string(&self.manifest).expect("manifest serializes").as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, &self.manifest_path)?;
        Ok(())
    }

    /// Moves up to `max` records into the file. After an injected crash the
    /// sink must be reopened, as a restarted process would.
    pub fn run_batch(&mut self, cluster: &Cluster, max: usize) -> Result<SinkBatch, BusError> {
        let (records, next) = cluster.fetch(&self.position("sink"), max)?;
        if records.is_empty() {
            return Ok(SinkBatch::default());
        }
        self.crash_at(FailPoint::BeforeFileWrite)?;
        let mut good = Vec::new();
        let mut bad = Vec::new();
        for d in &records {
            let mut line = d.record.payload.clone();
            while matches!(line.last(), Some(b'\n' | b'\r')) {
                line.pop();
            }
            line.push(b'\n');
            if is_statement(&d.record.payload) {
                good.push(line);
            } else {
                bad.push(line);
            }
        }
        let mut out = OpenOptions::new().append(true).open(&self.target)?;
        let mut dlq = OpenOptions::new().append(true).open(&self.dlq_path)?;
        for (i, line) in good.iter().enumerate() {
            if i == good.len() / 2 && self.fail_point == Some(FailPoint::MidFileWrite) {
                out.sync_all()?;
                self.crash_at(FailPoint::MidFileWrite)?;
            }
            out.write_all(line)?;
        }
        for line in &bad {
            dlq.write_all(line)?;
        }
        out.sync_all()?;
        dlq.sync_all()?;
        self.crash_at(FailPoint::MidFileWrite)?;
        self.crash_at(FailPoint::AfterFileWrite)?;

        let file_len = out.metadata()?.len();
        let dlq_len = dlq.metadata()?.len();
        self.manifest = Manifest {
            topic: self.manifest.topic.clone(),
            next: next.next,
            file_len,
            dlq_len,
            batches: self.manifest.batches + 1,
        };
        self.persist_manifest()?;
        self.crash_at(FailPoint::AfterManifestPersist)?;
        Ok(SinkBatch { written: good.len(), dead_lettered: bad.len() })
    }

    /// Runs batches until the topic is drained.
    pub fn drain(&mut self, cluster: &Cluster, batch: usize) -> Result<SinkBatch, BusError> {
        let mut total = SinkBatch::default();
        loop {
            let b = self.run_batch(cluster, batch.max(1))?;
            if b == SinkBatch::default() {
                return Ok(total);
            }
            total.written += b.written;
            total.dead_lettered += b.dead_lettered;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{load_store, ParseOptions, RdfFormat};

    fn statement(i: usize) -> String {
        format!("<http://healthcare.org/ppg/s{i}> <http://healthcare.org/ppg/hasHR> \"{i}\"^^<http://www.w3.org/2001/XMLSchema#integer> .")
    }

    fn setup(n: usize) -> Cluster {
        let c = Cluster::new(3).unwrap();
        c.create_topic("rdf", 3, 3).unwrap();
        for i in 0..n {
            c.produce("rdf", None, statement(i).as_bytes()).unwrap();
        }
        c
    }

    #[test]
    fn hundred_records_load_back() {
        let dir = tempfile::tempdir().unwrap();
        let c = setup(100);
        let path = dir.path().join("out.nt");
        let mut sink = FileSink::open(&c, "rdf", &path).unwrap();
        assert_eq!(sink.drain(&c, 17).unwrap().written, 100);
        let store =
            load_store(&fs::read_to_string(&path).unwrap(), RdfFormat::NTriples, &ParseOptions::default()).unwrap();
        assert_eq!(store.len(), 100);
    }

    #[test]
    fn every_crash_point_is_idempotent() {
        for point in [
            FailPoint::BeforeFileWrite,
            FailPoint::MidFileWrite,
            FailPoint::AfterFileWrite,
            FailPoint::AfterManifestPersist,
        ] {
            let dir = tempfile::tempdir().unwrap();
            let c = setup(50);
            let path = dir.path().join("out.nt");
            let mut sink = FileSink::open(&c, "rdf", &path).unwrap();
            sink.run_batch(&c, 10).unwrap();
            sink.inject(point);
            assert_eq!(sink.run_batch(&c, 10), Err(BusError::InjectedCrash(point)));
            let mut sink = FileSink::open(&c, "rdf", &path).unwrap();
            sink.drain(&c, 10).unwrap();
            let text = fs::read_to_string(&path).unwrap();
            let mut lines: Vec<&str> = text.lines().collect();
            assert_eq!(lines.len(), 50, "{point:?}");
            lines.sort_unstable();
            lines.dedup();
            assert_eq!(lines.len(), 50, "{point:?}");
        }
    }

    #[test]
    fn bad_payloads_dead_lettered() {
        let dir = tempfile::tempdir().unwrap();
        let c = setup(3);
        c.produce("rdf", None, b"not a triple").unwrap();
        let path = dir.path().join("out.nt");
        let mut sink = FileSink::open(&c, "rdf", &path).unwrap();
        let total = sink.drain(&c, 100).unwrap();
        assert_eq!((total.written, total.dead_lettered), (3, 1));
        assert_eq!(fs::read_to_string(sink.dead_letter_path()).unwrap(), "not a triple\n");
        assert_eq!(sink.manifest().next.iter().sum::<u64>(), 4);
    }

    #[test]
    fn empty_topic() {
        let dir = tempfile::tempdir().unwrap();
        let c = setup(0);
        let path = dir.path().join("out.nt");
        let mut sink = FileSink::open(&c, "rdf", &path).unwrap();
        assert_eq!(sink.drain(&c, 10).unwrap(), SinkBatch::default());
        assert_eq!(fs::read_to_string(&path).unwrap(), "");
        assert_eq!(sink.manifest().next, vec![0, 0, 0]);
    }
}
