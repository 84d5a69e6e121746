//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its elapsed time against its budget; the test fails if any does.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semcep::bus::{Cluster, FailPoint, FileSink};
use semcep::cep::{
    classify_cohort, default_rules, deploy_under_load, generate_cohort, parse_rule, CepEngine, CohortSpec, LoadConfig,
    VitalEvent, RULE_1, RULE_2, RULE_3,
};
use semcep::csv2rdf::{convert_default, preprocess, PpgRecord, PreprocessConfig};
use semcep::kb::{compute_metrics, load_sample_kb, load_sample_ontology, summarize_ontology};
use semcep::query::{builtin_plans, execute, execute_reference, parse_query, QueryPlan};
use semcep::rdf::vocab::{ppg, RDFS_LABEL, RDF_TYPE};
use semcep::rdf::{load_store, parse, partition, serialize, ParseOptions, RdfFormat, Term, TripleStore};
use semcep::thresholds::{alpha_from_n, ewma_series, sma, wma, EwmaInit};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Writes past the test harness's output capture so the verdicts land in
/// the log of a plain `cargo test` run.
fn report_line(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

// 1. CSV to RDF fidelity

fn random_recording(rng: &mut ChaCha8Rng, rows: usize) -> Vec<PpgRecord> {
    let mut t = 0i64;
    (0..rows)
        .map(|_| {
            t += rng.gen_range(1..=3);
            let mut r = PpgRecord::new(
                t,
                rng.gen_range(40.0..180.0),
                rng.gen_range(40.0..180.0),
                rng.gen_range(8.0..40.0),
                rng.gen_range(80.0..100.0),
            );
            // knock out a few cells and plant implausible values
            for v in r.values.iter_mut() {
                match rng.gen_range(0..40) {
                    0 => *v = None,
                    1 => *v = Some(-5.0),
                    _ => {}
                }
            }
            r
        })
        .collect()
}

fn csv_fidelity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let properties: BTreeSet<String> = [RDF_TYPE.to_string()]
        .into_iter()
        .chain(["hasTime", "hasHR", "hasPULSE", "hasRESP", "hasSpO2"].map(ppg))
        .collect();
    for rows in [0usize, 1, 480, 5000] {
        let mut raw = random_recording(&mut rng, rows);
        if let Some(first) = raw.first_mut() {
            *first = PpgRecord::new(first.time, 80.0, 80.0, 16.0, 97.0);
        }
        for decimal in [false, true] {
            let config = PreprocessConfig { integer_values: !decimal, ..PreprocessConfig::default() };
            let clean = preprocess(&raw, &config).map_err(|e| e.to_string())?;
            ensure!(clean.len() == rows, "preprocess changed the row count: {rows} -> {}", clean.len());
            let triples = convert_default(&clean, "P1").map_err(|e| e.to_string())?;
            ensure!(triples.len() == 6 * rows, "R={rows}: {} triples, want {}", triples.len(), 6 * rows);
            let used: BTreeSet<String> = triples.iter().map(|t| t.predicate.value_str().to_string()).collect();
            ensure!(rows == 0 || used == properties, "R={rows}: property set {used:?}");
            let store: TripleStore = triples.into_iter().collect();
            ensure!(store.len() == 6 * rows, "R={rows}: duplicate triples");
            for format in [RdfFormat::Turtle, RdfFormat::NTriples] {
                let text = serialize(&store, format);
                let back = load_store(&text, format, &ParseOptions::default()).map_err(|e| e.to_string())?;
                ensure!(back.same_triples(&store), "R={rows}: {format:?} round trip lost triples");
                ensure!(serialize(&back, format) == text, "R={rows}: {format:?} re-serialization differs");
            }
        }
    }
    Ok(())
}

// 2. Partition-invariant querying

fn partition_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let builtins: Vec<(String, QueryPlan)> = builtin_plans();
    let levels: BTreeSet<usize> = [1, 2, threads()].into_iter().collect();
    let mut nonempty = 0usize;
    for round in 0..200 {
        let store = common::random_store(&mut rng, 10_000);
        let mut plans: Vec<(String, QueryPlan)> = builtins.clone();
        for i in 0..3 {
            let text = common::random_query(&mut rng);
            let plan = parse_query(&text).map_err(|e| format!("generated query does not parse: {text}: {e}"))?;
            plans.push((format!("random-{i}: {text}"), plan));
        }
        let chunkings: Vec<_> = [1usize, 2, 3, 5, 8].iter().map(|&k| partition(&store, k).unwrap()).collect();
        for (label, plan) in &plans {
            let expected = execute_reference(&store, plan);
            nonempty += usize::from(!expected.is_empty());
            for chunked in &chunkings {
                for &p in &levels {
                    let got = execute(chunked, plan, p).map_err(|e| format!("{label}: {e}"))?;
                    ensure!(
                        got == expected,
                        "round {round}, {label}, k={}, parallelism={p}: {} rows, reference {}",
                        chunked.k(),
                        got.len(),
                        expected.len()
                    );
                }
            }
        }
    }
    ensure!(nonempty > 200, "only {nonempty} non-empty reference results; generator too sparse");
    Ok(())
}

// 3. Knowledge-base ground truth

fn kb_ground_truth() -> Check {
    let kb = load_sample_kb();
    let chunked = partition(&kb, 3).unwrap();
    let plans: BTreeMap<String, QueryPlan> = builtin_plans().into_iter().collect();
    let disease_drugs = execute(&chunked, &plans["Q4"], threads()).map_err(|e| e.to_string())?;
    ensure!(disease_drugs.len() == 9, "disease-drug query returned {} rows", disease_drugs.len());

    let label = |t: &Term| -> String {
        let p = Term::iri(RDFS_LABEL).unwrap();
        kb.matching(Some(t), Some(&p), None).first().map_or(String::new(), |t| t.object.value_str().to_string())
    };
    let hyp = execute(&chunked, &plans["Q5"], threads()).map_err(|e| e.to_string())?;
    let mut medications: Vec<String> = Vec::new();
    let mut side_effects: Vec<String> = Vec::new();
    for row in &hyp.rows {
        let m = label(&row[0]);
        if !medications.contains(&m) {
            medications.push(m);
        }
        side_effects.push(label(&row[1]));
    }
    ensure!(medications.join(", ") == "Supplemental Oxygen, Albuterol", "medications: {medications:?}");
    ensure!(
        side_effects.join(", ") == "Dry Nose, Headache, Tremors, Increased Heart Rate",
        "side effects: {side_effects:?}"
    );
    Ok(())
}

// 4. Threshold math

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

fn brute_sma(w: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in w {
        s += x;
    }
    s / w.len() as f64
}

fn brute_wma(w: &[f64]) -> f64 {
    // oldest first: weight j for position j, so the newest gets p - 1
    let p = w.len();
    let num: f64 = w.iter().enumerate().map(|(j, x)| j as f64 * x).sum();
    num / (p * (p - 1) / 2) as f64
}

fn brute_ewma(xs: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        out.push(if i == 0 { x } else { alpha * x + (1.0 - alpha) * out[i - 1] });
    }
    out
}

fn threshold_math() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..10_000 {
        let len = rng.gen_range(2..=60);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(-50.0..250.0)).collect();
        let p = rng.gen_range(2..=len);
        let w = &xs[len - p..];
        let alpha = rng.gen_range(0.01..=1.0);
        let (a, b) = (rng.gen_range(0.1..10.0), rng.gen_range(-100.0..100.0));
        let moved: Vec<f64> = xs.iter().map(|x| a * x + b).collect();

        let s = sma(&xs, p).map_err(|e| e.to_string())?;
        ensure!(close(s, brute_sma(w)), "case {case}: sma {s} vs {}", brute_sma(w));
        let m = wma(&xs, p).map_err(|e| e.to_string())?;
        ensure!(close(m, brute_wma(w)), "case {case}: wma {m} vs {}", brute_wma(w));
        let e = ewma_series(&xs, alpha, EwmaInit::First).map_err(|e| e.to_string())?;
        for (got, want) in e.iter().zip(brute_ewma(&xs, alpha)) {
            ensure!(close(*got, want), "case {case}: ewma {got} vs {want}");
        }

        let s2 = sma(&moved, p).unwrap();
        ensure!(close(s2, a * s + b), "case {case}: sma not equivariant");
        let m2 = wma(&moved, p).unwrap();
        ensure!(close(m2, a * m + b), "case {case}: wma not equivariant");
        let e2 = ewma_series(&moved, alpha, EwmaInit::First).unwrap();
        for (got, base) in e2.iter().zip(&e) {
            ensure!(close(*got, a * base + b), "case {case}: ewma not equivariant");
        }

        let raw = ewma_series(&xs, 1.0, EwmaInit::First).unwrap();
        ensure!(raw == xs, "case {case}: ewma(alpha=1) differs from the raw series");
    }
    let half: f64 = alpha_from_n(3).map_err(|e| e.to_string())?;
    ensure!(half == 0.5, "alpha(n=3) = {half}");
    Ok(())
}

// 5. Rule semantics

#[derive(Clone, Copy)]
enum OracleThreshold {
    Literal(f64),
    Sma(usize),
    Ewma(f64),
}

struct OracleRule {
    id: String,
    field: &'static str,
    op: &'static str,
    threshold: OracleThreshold,
}

fn random_rule(rng: &mut ChaCha8Rng, id: usize) -> (String, OracleRule) {
    let (field, name, lo, hi) = *[
        ("hr", "heartRate", 50.0, 150.0),
        ("spo2", "SpO2", 80.0, 100.0),
        ("resp", "respiration", 8.0, 30.0),
        ("pulse", "pulse", 50.0, 150.0),
    ]
    .choose(rng)
    .unwrap();
    let op = *["<", "<=", ">", ">="].choose(rng).unwrap();
    let (text, threshold) = match rng.gen_range(0..4) {
        0 => {
            let p = rng.gen_range(1..=5);
            (format!("sma(p={p})"), OracleThreshold::Sma(p))
        }
        1 => {
            let n = rng.gen_range(1..=9);
            (format!("ewma(n={n})"), OracleThreshold::Ewma(2.0 / (n as f64 + 1.0)))
        }
        _ => {
            let v = rng.gen_range(lo as i64..=hi as i64) as f64;
            (format!("{v}"), OracleThreshold::Literal(v))
        }
    };
    let id = format!("r{id}");
    let rule = format!("{id}: from S [{name} {op} {text}] select {name}, patientId insert into (L{id});");
    (rule, OracleRule { id, field, op, threshold })
}

fn holds(op: &str, v: f64, t: f64) -> bool {
    match op {
        "<" => v < t,
        "<=" => v <= t,
        ">" => v > t,
        _ => v >= t,
    }
}

/// Expected firings as (event index, rule id), found without the engine.
fn oracle(events: &[VitalEvent], rules: &[OracleRule]) -> BTreeSet<(usize, String)> {
    let mut history: HashMap<(&str, &str), Vec<f64>> = HashMap::new();
    let mut out = BTreeSet::new();
    for (i, e) in events.iter().enumerate() {
        for r in rules {
            let Some(&v) = e.values.get(r.field) else { continue };
            let h = history.entry((&r.id, &e.patient)).or_default();
            let t = match r.threshold {
                OracleThreshold::Literal(t) => Some(t),
                OracleThreshold::Sma(p) => (h.len() >= p).then(|| h[h.len() - p..].iter().sum::<f64>() / p as f64),
                OracleThreshold::Ewma(alpha) => brute_ewma(h, alpha).last().copied(),
            };
            h.push(v);
            if t.is_some_and(|t| holds(r.op, v, t)) {
                out.insert((i, r.id.clone()));
            }
        }
    }
    out
}

fn rule_semantics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total = 0;
    let mut fired = 0;
    while total < 100_000 {
        let rules: Vec<(String, OracleRule)> = (0..rng.gen_range(1..=6)).map(|i| random_rule(&mut rng, i)).collect();
        let engine = CepEngine::new();
        for (text, _) in &rules {
            engine.deploy(parse_rule(text).map_err(|e| format!("{text}: {e}"))?).map_err(|e| e.to_string())?;
        }
        let patients = ["P1", "P2", "P3"];
        let events: Vec<VitalEvent> = (0..2_000)
            .map(|i| {
                let mut values = vec![("hr", rng.gen_range(50..=150) as f64)];
                if rng.gen_bool(0.8) {
                    values.push(("spo2", rng.gen_range(80..=100) as f64));
                }
                if rng.gen_bool(0.8) {
                    values.push(("resp", rng.gen_range(8..=30) as f64));
                }
                if rng.gen_bool(0.5) {
                    values.push(("pulse", rng.gen_range(50..=150) as f64));
                }
                VitalEvent::new(i, patients.choose(&mut rng).unwrap(), &values)
            })
            .collect();
        // events carry distinct timestamps, so ts identifies the event
        let mut got = BTreeSet::new();
        for e in &events {
            for d in engine.ingest(e).map_err(|e| e.to_string())? {
                ensure!(got.insert((d.ts as usize, d.rule.clone())), "duplicate firing {} at {}", d.rule, d.ts);
            }
        }
        let oracle_rules: Vec<OracleRule> = rules.into_iter().map(|(_, r)| r).collect();
        let want = oracle(&events, &oracle_rules);
        ensure!(got == want, "engine fired {} times, oracle {}", got.len(), want.len());
        total += events.len();
        fired += got.len();
    }
    ensure!(fired > 0, "no rule ever fired");

    let engine = CepEngine::with_rules(
        [RULE_1, RULE_2, RULE_3].iter().map(|r| parse_rule(r)).collect::<Result<_, _>>().map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let expect: [(f64, &[&str]); 3] = [
        (95.0, &["Less chances of Tachycardia"]),
        (110.0, &["Moderate chances of Tachycardia"]),
        // 125 exceeds both thresholds, so Rules 2 and 3 both fire
        (125.0, &["Moderate chances of Tachycardia", "Tachycardia"]),
    ];
    for (i, (hr, labels)) in expect.iter().enumerate() {
        let out = engine.ingest(&VitalEvent::new(i as i64, "P1", &[("hr", *hr)])).map_err(|e| e.to_string())?;
        let got: Vec<&str> = out.iter().map(|d| d.label.as_str()).collect();
        ensure!(got == *labels, "hr={hr}: labels {got:?}");
    }
    Ok(())
}

// 6. Cohort study

fn cohort_study() -> Check {
    let patients = generate_cohort(&CohortSpec::default()).map_err(|e| e.to_string())?;
    ensure!(patients.len() == 81, "{} patients", patients.len());
    let report =
        classify_cohort(&patients, &default_rules(), &semcep::RangeTableF64::standard()).map_err(|e| e.to_string())?;
    let counts = (report.diseased, report.disease_free, report.undetected, report.correct);
    ensure!(counts == (60, 9, 12, 69), "diseased/free/undetected/correct = {counts:?}");
    ensure!(format!("{:.2}", report.accuracy * 100.0) == "85.19", "accuracy {}", report.accuracy);
    Ok(())
}

// 7. Streaming guarantees

fn statement(run: usize, i: usize) -> String {
    format!("<http://healthcare.org/ppg/Time_run{run}_{i}> <http://healthcare.org/ppg/hasHR> \"{}\"^^<http://www.w3.org/2001/XMLSchema#integer> .", 60 + i % 90)
}

const FAIL_POINTS: [FailPoint; 4] =
    [FailPoint::BeforeFileWrite, FailPoint::MidFileWrite, FailPoint::AfterFileWrite, FailPoint::AfterManifestPersist];

/// One sink batch, sometimes crashing; a crash reopens the sink the way a
/// restarted process would. Returns whether anything moved or crashed.
fn sink_step(
    sink: &mut FileSink,
    cluster: &Cluster,
    rng: &mut ChaCha8Rng,
    crashes: &mut usize,
) -> Result<bool, String> {
    if rng.gen_bool(0.3) {
        sink.inject(*FAIL_POINTS.choose(rng).unwrap());
    }
    match sink.run_batch(cluster, rng.gen_range(1..=120)) {
        Ok(b) => Ok(b.written + b.dead_lettered > 0),
        Err(semcep::bus::BusError::InjectedCrash(_)) => {
            *crashes += 1;
            *sink = FileSink::open(cluster, "ppg", sink.target().to_path_buf()).map_err(|e| e.to_string())?;
            Ok(true)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn one_stream_run(run: usize, rng: &mut ChaCha8Rng, dir: &std::path::Path, crashes: &mut usize) -> Check {
    let cluster = Cluster::new(3).map_err(|e| e.to_string())?;
    cluster.create_topic("ppg", 3, 3).map_err(|e| e.to_string())?;
    let records = 1_000;
    let victim = rng.gen_range(0..3);
    let fail_at = rng.gen_range(0..records);
    let recover_at = if rng.gen_bool(0.7) { Some(rng.gen_range(fail_at..=records)) } else { None };
    let target = dir.join(format!("run{run}.nt"));
    let mut sink = FileSink::open(&cluster, "ppg", &target).map_err(|e| e.to_string())?;
    let mut partition_of: HashMap<String, usize> = HashMap::new();
    let mut acked: Vec<Vec<String>> = vec![Vec::new(); 3];
    for i in 0..records {
        if i == fail_at {
            cluster.fail_broker(victim).map_err(|e| e.to_string())?;
        }
        if Some(i) == recover_at {
            cluster.recover_broker(victim).map_err(|e| e.to_string())?;
        }
        let line = statement(run, i);
        let (p, _) = cluster.produce("ppg", None, line.as_bytes()).map_err(|e| format!("produce {i}: {e}"))?;
        partition_of.insert(line.clone(), p);
        acked[p].push(line);
        if rng.gen_bool(0.05) {
            sink_step(&mut sink, &cluster, rng, crashes)?;
        }
    }
    while sink_step(&mut sink, &cluster, rng, crashes)? {}

    let text = std::fs::read_to_string(&target).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = text.lines().collect();
    let unique: BTreeSet<&str> = lines.iter().copied().collect();
    ensure!(unique.len() == lines.len(), "run {run}: {} duplicate sink lines", lines.len() - unique.len());
    let expected: usize = acked.iter().map(Vec::len).sum();
    ensure!(lines.len() == expected, "run {run}: {} lines for {expected} acknowledged records", lines.len());
    let mut seen: Vec<Vec<String>> = vec![Vec::new(); 3];
    for l in &lines {
        let p = *partition_of.get(*l).ok_or_else(|| format!("run {run}: unexpected line {l}"))?;
        seen[p].push(l.to_string());
    }
    ensure!(seen == acked, "run {run}: per-partition order differs from acknowledgement order");
    ensure!(
        cluster.replicas_consistent("ppg").map_err(|e| e.to_string())? || recover_at.is_none(),
        "run {run}: replicas diverged"
    );
    Ok(())
}

fn streaming_guarantees() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut crashes = 0;
    for run in 0..100 {
        one_stream_run(run, &mut rng, dir.path(), &mut crashes)?;
    }
    ensure!(crashes > 100, "only {crashes} injected crashes");
    let tiers = vec![0, 8_000, 16_000, 32_000, 48_000];
    let mut config = LoadConfig::new(default_rules());
    config.tiers = tiers.clone();
    let report = deploy_under_load(&config).map_err(|e| e.to_string())?;
    ensure!(
        report.records.len() == tiers.len() * default_rules().len(),
        "{} deployments recorded",
        report.records.len()
    );
    for t in &tiers {
        ensure!(report.records.iter().any(|r| r.load_eps == *t), "no deployment at {t} events/s");
    }
    ensure!(report.atomicity_violations == 0, "{} atomicity violations", report.atomicity_violations);
    report_line(&report.to_csv());
    Ok(())
}

// 8. Ontology metrics

fn micro(body: &str) -> TripleStore {
    let doc = format!(
        "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
         @prefix : <http://ex.org/> .\n{body}"
    );
    load_store(&doc, RdfFormat::Turtle, &ParseOptions::default()).expect("micro ontology parses")
}

fn ontology_metrics() -> Check {
    let summary = summarize_ontology(&load_sample_ontology()).map_err(|e| e.to_string())?;
    let m = compute_metrics(&summary).map_err(|e| e.to_string())?;
    ensure!(
        (summary.data_properties, summary.classes) == (28, 125),
        "DP/C = {}/{}",
        summary.data_properties,
        summary.classes
    );
    ensure!(summary.subclass_axioms == 123, "H = {}", summary.subclass_axioms);
    ensure!(m.attribute_richness == 0.224, "attribute richness {}", m.attribute_richness);
    ensure!(
        format!("{:.6}", m.relationship_richness) == "0.075188",
        "relationship richness {}",
        m.relationship_richness
    );
    // computed from the counts; the reference values 17.928 and 0.576 are inconsistent with them
    ensure!(
        m.axiom_class_ratio == 2250.0 / 125.0 && m.axiom_class_ratio != 17.928,
        "axiom/class {}",
        m.axiom_class_ratio
    );
    ensure!(
        m.average_population == 81.0 / 125.0 && m.average_population != 0.576,
        "population {}",
        m.average_population
    );

    // A > B > {C, D}; E stands alone. 2 data, 1 object property, 3 individuals
    // over 2 classes, one of them typed twice.
    let s = micro(
        ":B rdfs:subClassOf :A . :C rdfs:subClassOf :B . :D rdfs:subClassOf :B . :E a owl:Class .\n\
         :d1 a owl:DatatypeProperty . :d2 a owl:DatatypeProperty . :o1 a owl:ObjectProperty .\n\
         :i1 a :C . :i2 a :C . :i3 a :E . :i3 a :C .",
    );
    let sum = summarize_ontology(&s).map_err(|e| e.to_string())?;
    let mm = compute_metrics(&sum).map_err(|e| e.to_string())?;
    let c = 5.0;
    let checks = [
        ("attribute_richness", mm.attribute_richness, 2.0 / c),
        ("inheritance_richness", mm.inheritance_richness, 3.0 / c),
        ("relationship_richness", mm.relationship_richness, 1.0 / 4.0),
        ("class_richness", mm.class_richness, 2.0 / c),
        ("average_population", mm.average_population, 3.0 / c),
        ("axiom_class_ratio", mm.axiom_class_ratio, s.len() as f64 / c),
        ("class_relation_ratio", mm.class_relation_ratio, c / 4.0),
        ("average_breadth", mm.average_breadth, 5.0 / 3.0),
    ];
    for (name, got, want) in checks {
        ensure!((got - want).abs() < 1e-12, "micro {name}: {got} vs {want}");
    }
    ensure!(mm.absolute_leaf_cardinality == 3, "leaves {}", mm.absolute_leaf_cardinality);
    ensure!(mm.total_paths == 3, "paths {}", mm.total_paths);

    // diamond: two roots reach the leaf along two paths
    let d = summarize_ontology(&micro(":L rdfs:subClassOf :X . :L rdfs:subClassOf :Y .")).unwrap();
    ensure!((d.total_paths, d.leaf_classes) == (2, 1), "diamond paths {} leaves {}", d.total_paths, d.leaf_classes);
    let flat = compute_metrics(&summarize_ontology(&micro(":A a owl:Class .")).unwrap()).unwrap();
    ensure!(flat.degenerate_relations && flat.relationship_richness == 0.0, "relation-free ontology not flagged");
    ensure!(summarize_ontology(&micro(":A rdfs:subClassOf :B . :B rdfs:subClassOf :A .")).is_err(), "cycle accepted");
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, u64, fn() -> Check); 8] = [
        ("1 csv-to-rdf fidelity", 5, csv_fidelity),
        ("2 partition-invariant querying", 120, partition_invariance),
        ("3 knowledge-base ground truth", 5, kb_ground_truth),
        ("4 threshold math", 10, threshold_math),
        ("5 rule semantics", 30, rule_semantics),
        ("6 cohort study", 10, cohort_study),
        ("7 streaming guarantees", 120, streaming_guarantees),
        ("8 ontology metrics", 5, ontology_metrics),
    ];
    let mut failed = Vec::new();
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match (&result, elapsed <= Duration::from_secs(budget)) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => format!("FAIL (over the {budget} s budget)"),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        report_line(&format!("[{}] criterion {name}: {:.2} s / {budget} s\n", verdict, elapsed.as_secs_f64()));
        if !verdict.starts_with("PASS") {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn bundled_kb_parses_as_both_formats() {
    let kb = load_sample_kb();
    let nt = serialize(&kb, RdfFormat::NTriples);
    assert_eq!(parse(&nt, RdfFormat::NTriples, &ParseOptions::default()).unwrap().len(), kb.len());
}
