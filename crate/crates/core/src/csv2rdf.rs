//! PPG vital-sign CSV ingestion, cleaning and RDF conversion.
//!
//! A recording is a CSV with the columns `Time,HR,PULSE,RESP,SpO2` (any
//! order, case-insensitive). Empty cells are missing values. Cleaning
//! treats implausible values as missing and fills gaps by interpolating
//! over time; each cleaned row becomes six triples.

use thiserror::Error;

use crate::rdf::vocab::{ppg, RDF_TYPE, XSD_DECIMAL, XSD_INTEGER};
use crate::rdf::{RdfError, Term, Triple};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsvError {
    #[error("schema error: missing required column '{0}'")]
    MissingColumn(&'static str),
    #[error("parse error at row {row}, column '{column}': '{value}' is not a number")]
    BadCell { row: usize, column: String, value: String },
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("column '{0}' has no usable value in any record")]
    UnrecoverableColumn(&'static str),
    #[error("record at time {time} still has a missing value")]
    Incomplete { time: i64 },
    #[error("invalid patient id '{0}'")]
    InvalidPatientId(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("csv: {0}")]
    Csv(String),
}

/// The four measured vitals, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vital {
    Hr,
    Pulse,
    Resp,
    Spo2,
}

impl Vital {
    pub const ALL: [Vital; 4] = [Vital::Hr, Vital::Pulse, Vital::Resp, Vital::Spo2];

    pub fn column(self) -> &'static str {
        match self {
            Vital::Hr => "HR",
            Vital::Pulse => "PULSE",
            Vital::Resp => "RESP",
            Vital::Spo2 => "SpO2",
        }
    }

    pub fn property(self) -> &'static str {
        match self {
            Vital::Hr => "hasHR",
            Vital::Pulse => "hasPULSE",
            Vital::Resp => "hasRESP",
            Vital::Spo2 => "hasSpO2",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// One sample row. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PpgRecord {
    pub time: i64,
    pub values: [Option<f64>; 4],
}

impl PpgRecord {
    pub fn new(time: i64, hr: f64, pulse: f64, resp: f64, spo2: f64) -> Self {
        PpgRecord { time, values: [Some(hr), Some(pulse), Some(resp), Some(spo2)] }
    }

    pub fn get(&self, vital: Vital) -> Option<f64> {
        self.values[vital.index()]
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Imputation {
    LinearInterpolation,
    ForwardFill,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "bounds must be a non-empty interval");
        Bounds { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub imputation: Imputation,
    /// Plausibility bounds indexed like [`Vital::ALL`].
    pub bounds: [Bounds; 4],
    /// Round values half-up to integers. Turn off to keep decimals.
    pub integer_values: bool,
    /// Min-max scaling for export; see [`normalize_for_export`].
    pub normalize_export: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            imputation: Imputation::LinearInterpolation,
            bounds: [
                Bounds::new(20.0, 250.0),
                Bounds::new(20.0, 250.0),
                Bounds::new(4.0, 60.0),
                Bounds::new(50.0, 100.0),
            ],
            integer_values: true,
            normalize_export: false,
        }
    }
}

const TIME_COLUMN: &str = "Time";

/// Parses a recording. Time must be non-negative, integral and strictly increasing.
pub fn parse_csv(text: &str) -> Result<Vec<PpgRecord>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(false).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CsvError::Csv(e.to_string()))?.clone();
    let find = |name: &'static str| {
        headers.iter().position(|h| h.eq_ignore_ascii_case(name)).ok_or(CsvError::MissingColumn(name))
    };
    let time_col = find(TIME_COLUMN)?;
    let mut vital_cols = [0usize; 4];
    for v in Vital::ALL {
        vital_cols[v.index()] = find(v.column())?;
    }

    let mut records = Vec::new();
    let mut last_time: Option<i64> = None;
    for (i, row) in reader.records().enumerate() {
        // header is row 1
        let row_no = i + 2;
        let row = row.map_err(|e| CsvError::Csv(e.to_string()))?;
        let cell = |col: usize| row.get(col).unwrap_or("");
        let number = |col: usize, name: &str| -> Result<Option<f64>, CsvError> {
            let raw = cell(col);
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>().ok().filter(|v| v.is_finite()).map(Some).ok_or_else(|| CsvError::BadCell {
                row: row_no,
                column: name.to_string(),
                value: raw.to_string(),
            })
        };
        let time = number(time_col, TIME_COLUMN)?
            .ok_or_else(|| CsvError::BadRow { row: row_no, message: "empty Time cell".into() })?;
        if time.fract() != 0.0 || time < 0.0 {
            return Err(CsvError::BadRow {
                row: row_no,
                message: format!("time {time} is not a non-negative integer"),
            });
        }
        let time = time as i64;
        if last_time.is_some_and(|t| time <= t) {
            return Err(CsvError::BadRow { row: row_no, message: format!("time {time} is not increasing") });
        }
        last_time = Some(time);
        let mut values = [None; 4];
        for v in Vital::ALL {
            values[v.index()] = number(vital_cols[v.index()], v.column())?;
        }
        records.push(PpgRecord { time, values });
    }
    Ok(records)
}

/// Cleans a time-sorted recording: out-of-bounds values are dropped, then
/// every gap is filled. Interior gaps use the configured imputation;
/// leading and trailing gaps copy the nearest present value.
pub fn preprocess(records: &[PpgRecord], config: &PreprocessConfig) -> Result<Vec<PpgRecord>, CsvError> {
    let mut out: Vec<PpgRecord> = records.to_vec();
    if records.is_empty() {
        return Ok(out);
    }
    for vital in Vital::ALL {
        let bounds = config.bounds[vital.index()];
        let present: Vec<(i64, f64)> =
            records.iter().filter_map(|r| r.get(vital).filter(|v| bounds.contains(*v)).map(|v| (r.time, v))).collect();
        if present.is_empty() {
            return Err(CsvError::UnrecoverableColumn(vital.column()));
        }
        let mut next = 0; // index into `present` of the first sample at or after the current time
        for (row, record) in out.iter_mut().enumerate() {
            let t = records[row].time;
            while next < present.len() && present[next].0 < t {
                next += 1;
            }
            let value = if next < present.len() && present[next].0 == t {
                if config.integer_values {
                    round_half_up(present[next].1)
                } else {
                    present[next].1
                }
            } else {
                let before = next.checked_sub(1).map(|i| present[i]);
                let after = present.get(next).copied();
                let filled = match (before, after, config.imputation) {
                    (Some((t0, v0)), Some((t1, v1)), Imputation::LinearInterpolation) => interpolate(t0, v0, t1, v1, t),
                    (Some((_, v0)), _, _) => v0,
                    (None, Some((_, v1)), _) => v1,
                    (None, None, _) => unreachable!("present is non-empty"),
                };
                if config.integer_values {
                    round_half_up(filled)
                } else {
                    filled
                }
            };
            record.values[vital.index()] = Some(value);
        }
    }
    Ok(out)
}

/// Two-point linear interpolant through `(t0, v0)` and `(t1, v1)` at `t`.
pub fn interpolate(t0: i64, v0: f64, t1: i64, v1: f64, t: i64) -> f64 {
    let span = (t1 - t0) as f64;
    v0 + (v1 - v0) * ((t - t0) as f64 / span)
}

pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Min-max scales each vital to [0, 1]. Export only; rules work in raw units.
pub fn normalize_for_export(records: &[PpgRecord]) -> Vec<[f64; 4]> {
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for r in records {
        for (i, v) in r.values.iter().enumerate() {
            if let Some(v) = v {
                lo[i] = lo[i].min(*v);
                hi[i] = hi[i].max(*v);
            }
        }
    }
    records
        .iter()
        .map(|r| {
            let mut row = [0.0; 4];
            for i in 0..4 {
                let v = r.values[i].unwrap_or(lo[i]);
                row[i] = if hi[i] > lo[i] { (v - lo[i]) / (hi[i] - lo[i]) } else { 0.0 };
            }
            row
        })
        .collect()
}

/// Subject IRI for a sample: `<ns>Time_<patient>_<time>`.
pub fn sample_iri(namespace: &str, patient_id: &str, time: i64) -> String {
    format!("{namespace}Time_{patient_id}_{time}")
}

/// Six triples per record: `rdf:type PPGData`, `hasTime` and the four vitals.
pub fn convert(records: &[PpgRecord], patient_id: &str, namespace: &str) -> Result<Vec<Triple>, CsvError> {
    if patient_id.is_empty() || !patient_id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(CsvError::InvalidPatientId(patient_id.to_string()));
    }
    let rdf_type = Term::iri(RDF_TYPE)?;
    let class = Term::iri(format!("{namespace}PPGData"))?;
    let has_time = Term::iri(format!("{namespace}hasTime"))?;
    let properties: Vec<Term> =
        Vital::ALL.iter().map(|v| Term::iri(format!("{namespace}{}", v.property()))).collect::<Result<_, _>>()?;

    let mut triples = Vec::with_capacity(records.len() * 6);
    for record in records {
        let subject = Term::iri(sample_iri(namespace, patient_id, record.time))?;
        triples.push(Triple::new(subject.clone(), rdf_type.clone(), class.clone())?);
        triples.push(Triple::new(subject.clone(), has_time.clone(), Term::integer(record.time))?);
        for (vital, property) in Vital::ALL.iter().zip(&properties) {
            let value = record.get(*vital).ok_or(CsvError::Incomplete { time: record.time })?;
            triples.push(Triple::new(subject.clone(), property.clone(), numeric_literal(value))?);
        }
    }
    Ok(triples)
}

fn numeric_literal(value: f64) -> Term {
    if value.fract() == 0.0 && value.abs() < 9.0e15 {
        Term::Literal { lexical: format!("{}", value as i64), datatype: XSD_INTEGER.into() }
    } else {
        Term::Literal { lexical: format!("{value}"), datatype: XSD_DECIMAL.into() }
    }
}

/// `convert` under the canonical healthcare namespace.
pub fn convert_default(records: &[PpgRecord], patient_id: &str) -> Result<Vec<Triple>, CsvError> {
    convert(records, patient_id, &ppg(""))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "Time,HR,PULSE,RESP,SpO2\n";

    #[test]
    fn header_only_is_empty() {
        assert!(parse_csv(HEADER).unwrap().is_empty());
    }

    #[test]
    fn direct_mapping() {
        let records = parse_csv(&format!("{HEADER}1,85,84,16,98\n")).unwrap();
        assert_eq!(records, vec![PpgRecord::new(1, 85.0, 84.0, 16.0, 98.0)]);
    }

    #[test]
    fn empty_cell_is_missing() {
        let records = parse_csv(&format!("{HEADER}2,,84,16,98\n")).unwrap();
        assert_eq!(records[0].get(Vital::Hr), None);
        assert_eq!(records[0].get(Vital::Pulse), Some(84.0));
    }

    #[test]
    fn columns_in_any_order() {
        let records = parse_csv("spo2,resp,Time,pulse,hr\n98,16,1,84,85\n").unwrap();
        assert_eq!(records, vec![PpgRecord::new(1, 85.0, 84.0, 16.0, 98.0)]);
    }

    #[test]
    fn schema_and_cell_errors() {
        assert_eq!(parse_csv("Time,HR,PULSE,SpO2\n"), Err(CsvError::MissingColumn("RESP")));
        match parse_csv(&format!("{HEADER}1,85,x,16,98\n")) {
            Err(CsvError::BadCell { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "PULSE");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_csv(&format!("{HEADER}2,1,1,1,1\n1,1,1,1,1\n")), Err(CsvError::BadRow { .. })));
    }

    fn hr_series(values: &[Option<f64>]) -> Vec<PpgRecord> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| PpgRecord { time: i as i64 + 1, values: [*v, Some(80.0), Some(16.0), Some(97.0)] })
            .collect()
    }

    #[test]
    fn clean_input_is_fixpoint() {
        let records = vec![PpgRecord::new(1, 85.0, 84.0, 16.0, 98.0), PpgRecord::new(2, 86.0, 85.0, 17.0, 97.0)];
        assert_eq!(preprocess(&records, &PreprocessConfig::default()).unwrap(), records);
    }

    #[test]
    fn interior_gap_midpoint() {
        let out = preprocess(&hr_series(&[Some(80.0), None, Some(100.0)]), &PreprocessConfig::default()).unwrap();
        let hr: Vec<f64> = out.iter().map(|r| r.get(Vital::Hr).unwrap()).collect();
        assert_eq!(hr, vec![80.0, 90.0, 100.0]);
    }

    #[test]
    fn outlier_routed_through_interpolation() {
        let mut records = hr_series(&[Some(80.0), Some(80.0), Some(80.0)]);
        records[0].values[3] = Some(97.0);
        records[1].values[3] = Some(400.0);
        records[2].values[3] = Some(99.0);
        let expected = round_half_up(interpolate(1, 97.0, 3, 99.0, 2));
        let out = preprocess(&records, &PreprocessConfig::default()).unwrap();
        assert_eq!(out[1].get(Vital::Spo2), Some(expected));
        assert_eq!(expected, 98.0);
    }

    #[test]
    fn edge_gaps_copy_nearest() {
        let out =
            preprocess(&hr_series(&[None, Some(70.0), None, Some(90.0), None]), &PreprocessConfig::default()).unwrap();
        let hr: Vec<f64> = out.iter().map(|r| r.get(Vital::Hr).unwrap()).collect();
        assert_eq!(hr, vec![70.0, 70.0, 80.0, 90.0, 90.0]);
    }

    #[test]
    fn forward_fill() {
        let config = PreprocessConfig { imputation: Imputation::ForwardFill, ..Default::default() };
        let out = preprocess(&hr_series(&[None, Some(70.0), None, Some(90.0)]), &config).unwrap();
        let hr: Vec<f64> = out.iter().map(|r| r.get(Vital::Hr).unwrap()).collect();
        assert_eq!(hr, vec![70.0, 70.0, 70.0, 90.0]);
    }

    #[test]
    fn all_missing_column_fails() {
        assert_eq!(
            preprocess(&hr_series(&[None, Some(999.0)]), &PreprocessConfig::default()),
            Err(CsvError::UnrecoverableColumn("HR"))
        );
    }

    #[test]
    fn uneven_time_steps_interpolate_by_time() {
        let mut records = hr_series(&[Some(60.0), None, Some(90.0)]);
        records[2].time = 4; // gap at t=2 between t=1 and t=4
        let out = preprocess(&records, &PreprocessConfig::default()).unwrap();
        assert_eq!(out[1].get(Vital::Hr), Some(70.0));
    }

    #[test]
    fn convert_counts() {
        let one = convert_default(&[PpgRecord::new(1, 85.0, 84.0, 16.0, 98.0)], "p1").unwrap();
        assert_eq!(one.len(), 6);
        assert!(one.iter().all(|t| t.subject.as_iri() == Some("http://healthcare.org/ppg/Time_p1_1")));
        assert!(one[1..]
            .iter()
            .all(|t| matches!(&t.object, Term::Literal { datatype, .. } if datatype == XSD_INTEGER)));
        assert!(convert_default(&[], "p1").unwrap().is_empty());
        assert!(matches!(convert_default(&[], "bad id"), Err(CsvError::InvalidPatientId(_))));
    }

    #[test]
    fn decimal_mode_keeps_fraction() {
        let config = PreprocessConfig { integer_values: false, ..Default::default() };
        let out = preprocess(&hr_series(&[Some(80.0), None, Some(81.0)]), &config).unwrap();
        assert_eq!(out[1].get(Vital::Hr), Some(80.5));
        let triples = convert_default(&out, "p").unwrap();
        let hr = &triples[6 + 2].object;
        assert_eq!(hr, &Term::Literal { lexical: "80.5".into(), datatype: XSD_DECIMAL.into() });
    }

    #[test]
    fn normalization_scales_columns() {
        let rows = normalize_for_export(&[
            PpgRecord::new(1, 60.0, 60.0, 10.0, 90.0),
            PpgRecord::new(2, 100.0, 60.0, 20.0, 100.0),
        ]);
        assert_eq!(rows[0], [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(rows[1], [1.0, 0.0, 1.0, 1.0]);
    }
}
