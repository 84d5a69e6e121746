use std::collections::BTreeMap;
use std::time::Instant;

use super::{CepEngine, CepError, VitalEvent, WindowKind, WindowSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct WindowRow {
    pub start_ms: i64,
    pub end_ms: i64,
    pub events: usize,
    pub derived: usize,
    /// Summed processing time of the window's events.
    pub elapsed_seconds: f64,
    /// False for trailing sliding windows that run past the stream horizon.
    pub complete: bool,
}

/// Feeds `events` (time-ordered) through `engine` once and reports, per
/// window, how many events and derived events fell into it.
pub fn window_stats(engine: &CepEngine, spec: WindowSpec, events: &[VitalEvent]) -> Result<Vec<WindowRow>, CepError> {
    if events.windows(2).any(|w| w[1].ts < w[0].ts) {
        return Err(CepError::InvalidArgument("window report needs events in time order".into()));
    }
    let (Some(first), Some(last)) = (events.first(), events.last()) else { return Ok(Vec::new()) };
    if first.ts < 0 {
        return Err(CepError::InvalidArgument("event timestamps must be non-negative".into()));
    }
    let mut rows: BTreeMap<i64, WindowRow> = BTreeMap::new();
    let horizon = (last.ts / spec.slide_ms + 1) * spec.slide_ms;
    let mut start = spec.first_start_covering(first.ts);
    while start <= last.ts {
        let end = start + spec.length_ms;
        let complete = spec.kind == WindowKind::Tumbling || end <= horizon;
        rows.insert(
            start,
            WindowRow { start_ms: start, end_ms: end, events: 0, derived: 0, elapsed_seconds: 0.0, complete },
        );
        start += spec.slide_ms;
    }
    for e in events {
        let t0 = Instant::now();
        let derived = engine.ingest(e)?.len();
        let elapsed = t0.elapsed().as_secs_f64();
        for s in spec.starts_containing(e.ts) {
            let row = rows.get_mut(&s).expect("window enumerated");
            row.events += 1;
            row.derived += derived;
            row.elapsed_seconds += elapsed;
        }
    }
    Ok(rows.into_values().collect())
}
