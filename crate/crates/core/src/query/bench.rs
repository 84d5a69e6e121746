use std::time::Instant;

use crate::rdf::ChunkedStore;

use super::{execute, parse_query, QueryError, QueryPlan};

/// Five benchmark queries: a patient, medication and side-effect join, two
/// single-star filters and the two knowledge-base lookups.
pub fn builtin_queries() -> Vec<(String, String)> {
    [
        (
            "Q1",
            "SELECT ?patient ?sideEffect WHERE { ?patient SSN:hasHeartRate ?hr . \
             ?patient SSN:hasCondition \"Tachycardia\" . ?patient SSN:takesMedication ?medication . \
             ?medication SSN:hasSideEffect ?sideEffect . FILTER(?hr > 120) }",
        ),
        ("Q2", "SELECT ?patient ?hr WHERE { ?patient SSN:hasHeartRate ?hr . FILTER(?hr > 100) }"),
        ("Q3", "SELECT ?obs ?spo2 WHERE { ?obs rdf:type SSN:PPGData ; SSN:hasSpO2 ?spo2 . FILTER(?spo2 < 90) }"),
        (
            "Q4",
            "SELECT ?disease ?drug WHERE { ?disease rdf:type SSN:Disease . ?drug rdf:type SSN:Drug . \
             ?disease SSN:treatedBy ?drug . } LIMIT 9",
        ),
        (
            "Q5",
            "SELECT ?medication ?sideEffect WHERE { ?disease rdf:type SSN:Disease ; rdfs:label \"Hypoxemia\" ; \
             SSN:recommendedMedication ?medication . ?medication SSN:hasSideEffect ?sideEffect . }",
        ),
    ]
    .into_iter()
    .map(|(l, q)| (l.to_string(), q.to_string()))
    .collect()
}

/// Parses `"1;2;3"` or `"1+2;2+3"`: combos separated by `;`, 1-based chunk
/// numbers joined by `+` or `,`. Returns 0-based indexes.
pub fn parse_combos(text: &str, k: usize) -> Result<Vec<Vec<usize>>, QueryError> {
    let bad = |m: String| QueryError::Parse { pos: 0, message: m };
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|combo| {
            combo
                .split(['+', ','])
                .map(|n| {
                    let n: usize = n.trim().parse().map_err(|_| bad(format!("bad chunk number '{n}'")))?;
                    if n == 0 || n > k {
                        return Err(bad(format!("chunk {n} outside 1..={k}")));
                    }
                    Ok(n - 1)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub query: String,
    /// 1-based chunk numbers joined by `+`.
    pub combo: String,
    pub median_seconds: f64,
    pub rows: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["query", "combo", "median_seconds", "rows"]).expect("writing to memory");
        for c in &self.cells {
            w.write_record([c.query.clone(), c.combo.clone(), format!("{:.6}", c.median_seconds), c.rows.to_string()])
                .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
    }

    /// Query rows by combo columns, seconds in each cell.
    pub fn to_table(&self) -> String {
        let mut queries: Vec<&str> = Vec::new();
        let mut combos: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !queries.contains(&c.query.as_str()) {
                queries.push(&c.query);
            }
            if !combos.contains(&c.combo.as_str()) {
                combos.push(&c.combo);
            }
        }
        let mut out = String::from("query");
        for combo in &combos {
            out.push_str(&format!("\tChunk-{combo}"));
        }
        out.push('\n');
        for q in &queries {
            out.push_str(q);
            for combo in &combos {
                match self.cells.iter().find(|c| c.query == *q && c.combo == *combo) {
                    Some(c) => out.push_str(&format!("\t{:.4}", c.median_seconds)),
                    None => out.push_str("\t-"),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Times every query on every chunk combination. Labels are opaque.
pub fn bench(
    chunked: &ChunkedStore,
    queries: &[(String, QueryPlan)],
    combos: &[Vec<usize>],
    repeats: usize,
    parallelism: usize,
) -> Result<BenchReport, QueryError> {
    let repeats = repeats.max(1);
    let mut cells = Vec::new();
    for (label, plan) in queries {
        for combo in combos {
            let subset = chunked.select(combo)?;
            let mut times = Vec::with_capacity(repeats);
            let mut rows = 0;
            for _ in 0..repeats {
                let start = Instant::now();
                rows = execute(&subset, plan, parallelism)?.len();
                times.push(start.elapsed().as_secs_f64());
            }
            let combo = combo.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("+");
            cells.push(BenchCell { query: label.clone(), combo, median_seconds: median(times), rows });
        }
    }
    Ok(BenchReport { cells })
}

/// Parses the built-in queries.
pub fn builtin_plans() -> Vec<(String, QueryPlan)> {
    builtin_queries().into_iter().map(|(l, q)| (l, parse_query(&q).expect("built-in query parses"))).collect()
}
