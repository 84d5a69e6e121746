use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use semcep::bus::{run_demo, DemoConfig};
use semcep::cep::{
    classify_cohort, default_rules, deploy_under_load, emit_rdf, generate_cohort, parse_rules, read_events,
    risk_distribution_csv, window_stats, write_jsonl, CepEngine, CohortSpec, LoadConfig, VitalEvent, WindowSpec,
};
use semcep::csv2rdf::{convert_default, parse_csv, preprocess, Imputation, PreprocessConfig};
use semcep::kb::{
    compute_metrics, generate_clinical_dataset, generate_kb, load_sample_kb, load_sample_ontology, sample_kb_turtle,
    summarize_ontology,
};
use semcep::query::{bench, builtin_plans, execute, parse_combos, parse_query, QueryPlan};
use semcep::rdf::{load_store, partition, serialize, vocab, ParseOptions, RdfFormat, TripleStore};
use semcep::thresholds::RangeTable;

use crate::{
    BenchArgs, CepArgs, CohortArgs, Command, ConvertArgs, KbArgs, LoadArgs, MetricsArgs, QueryArgs, StreamDemoArgs,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert(a) => convert(a),
        Command::Load(a) => load(a),
        Command::Kb(a) => kb(a),
        Command::Query(a) => query(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Cep(a) => cep(a),
        Command::Cohort(a) => cohort(a),
        Command::StreamDemo(a) => stream_demo(a),
        Command::Metrics(a) => metrics(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_file(path: &Path, options: &ParseOptions) -> Result<TripleStore> {
    let text = read(path)?;
    load_store(&text, RdfFormat::from_path(path), options).with_context(|| format!("parsing {}", path.display()))
}

fn threads(parallelism: usize) -> usize {
    if parallelism > 0 {
        parallelism
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

fn convert(a: ConvertArgs) -> Result<()> {
    let text = read(&a.csv)?;
    // A zero-byte file converts to an empty graph; a header without the
    // required columns is still an error.
    let records = if text.trim().is_empty() { Vec::new() } else { parse_csv(&text)? };
    let config = PreprocessConfig {
        imputation: if a.forward_fill { Imputation::ForwardFill } else { Imputation::LinearInterpolation },
        integer_values: !a.decimal,
        ..PreprocessConfig::default()
    };
    let clean = preprocess(&records, &config)?;
    let store: TripleStore = convert_default(&clean, &a.patient)?.into_iter().collect();
    write(&a.out, &serialize(&store, RdfFormat::from_path(&a.out)))?;
    eprintln!("{} records, {} triples -> {}", clean.len(), store.len(), a.out.display());
    Ok(())
}

fn load(a: LoadArgs) -> Result<()> {
    let store = load_file(&a.input, &ParseOptions { legacy_namespaces: a.legacy_namespaces })?;
    println!("triples  {}", store.len());
    println!("subjects {}", store.subjects().count());
    if let Some(out) = a.out {
        write(&out, &serialize(&store, RdfFormat::from_path(&out)))?;
    }
    Ok(())
}

fn kb(a: KbArgs) -> Result<()> {
    let format = RdfFormat::from_path(&a.out);
    let text = if a.generate {
        serialize(&generate_kb(a.diseases, a.drugs, a.seed)?, format)
    } else if format == RdfFormat::Turtle {
        sample_kb_turtle().to_string()
    } else {
        serialize(&load_sample_kb(), format)
    };
    write(&a.out, &text)
}

fn query(a: QueryArgs) -> Result<()> {
    let store = match &a.store {
        Some(path) => load_file(path, &ParseOptions::default())?,
        None => load_sample_kb(),
    };
    let plan = parse_query(&read(&a.query)?)?;
    let chunked = partition(&store, a.chunks)?;
    let results = execute(&chunked, &plan, threads(a.parallelism))?;
    match a.format.as_str() {
        "csv" => print!("{}", results.to_csv(a.labels.then_some(&store))),
        "tsv" => print!("{results}"),
        other => bail!("unknown output format '{other}' (expected csv or tsv)"),
    }
    Ok(())
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    let store = match &a.store {
        Some(path) => load_file(path, &ParseOptions::default())?,
        None => generate_clinical_dataset(a.patients, 10, a.seed).store,
    };
    let queries: Vec<(String, QueryPlan)> = match &a.queries {
        None => builtin_plans(),
        Some(dir) => {
            let mut files: Vec<_> = fs::read_dir(dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "rq"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .rq files in {}", dir.display());
            }
            files
                .iter()
                .map(|p| {
                    let label = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                    let plan = parse_query(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
                    Ok((label, plan))
                })
                .collect::<Result<_>>()?
        }
    };
    let combos = parse_combos(&a.combos, a.chunks)?;
    let chunked = partition(&store, a.chunks)?;
    let report = bench(&chunked, &queries, &combos, a.repeats, threads(a.parallelism))?;
    print!("{}", report.to_csv());
    if a.table {
        eprint!("{}", report.to_table());
    }
    Ok(())
}

fn cep(a: CepArgs) -> Result<()> {
    let rules = match &a.rules {
        Some(path) => parse_rules(&read(path)?).with_context(|| format!("parsing {}", path.display()))?,
        None => default_rules(),
    };
    if a.events.is_none() && a.report.is_none() {
        bail!("nothing to do: pass --events, --report or both");
    }
    if let Some(path) = &a.events {
        let events: Vec<VitalEvent> = read_events(&read(path)?)?;
        let engine = CepEngine::with_rules(rules.clone())?;
        let derived = engine.run(&events)?;
        let jsonl = write_jsonl(&derived);
        match &a.out {
            Some(out) => write(out, &jsonl)?,
            None => print!("{jsonl}"),
        }
        eprintln!("{} events, {} derived", events.len(), derived.len());
        if let Some(rdf) = &a.rdf {
            let store: TripleStore = emit_rdf(&derived, vocab::PPG)?.into_iter().collect();
            write(rdf, &serialize(&store, RdfFormat::from_path(rdf)))?;
        }
        if let Some(window) = &a.window {
            let spec: WindowSpec = window.parse()?;
            let mut sorted = events.clone();
            sorted.sort_by_key(|e| e.ts);
            let rows = window_stats(&CepEngine::with_rules(rules.clone())?, spec, &sorted)?;
            eprintln!("start_ms,end_ms,events,derived,elapsed_seconds,complete");
            for r in rows {
                eprintln!(
                    "{},{},{},{},{:.6},{}",
                    r.start_ms, r.end_ms, r.events, r.derived, r.elapsed_seconds, r.complete
                );
            }
        }
    }
    if let Some(report) = &a.report {
        let mut config = LoadConfig::new(rules);
        config.tiers = a.loads.clone();
        let result = deploy_under_load(&config)?;
        write(report, &result.to_csv())?;
        for (eps, n) in &result.events {
            eprintln!("load {eps} eps: {n} events ingested during deployment");
        }
        if result.atomicity_violations > 0 {
            bail!("{} events observed a partially deployed rule set", result.atomicity_violations);
        }
    }
    Ok(())
}

fn cohort(a: CohortArgs) -> Result<()> {
    let spec = CohortSpec {
        patients: a.patients,
        diseased: a.diseased,
        undetected: a.undetected,
        events_per_patient: a.events,
        seed: a.seed,
    };
    let patients = generate_cohort(&spec)?;
    let report = classify_cohort(&patients, &default_rules(), &RangeTable::standard())?;
    println!("patients     {}", patients.len());
    println!("diseased     {}", report.diseased);
    println!("disease-free {}", report.disease_free);
    println!("undetected   {}", report.undetected);
    println!("accuracy     {:.2}%", report.accuracy * 100.0);
    if let Some(path) = &a.distribution {
        write(path, &risk_distribution_csv(&report))?;
    }
    Ok(())
}

fn parse_broker(text: &str) -> Result<Option<usize>> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    if let Ok(i) = t.parse::<usize>() {
        return Ok(Some(i));
    }
    match t.as_bytes() {
        [c] if c.is_ascii_alphabetic() => Ok(Some(usize::from(c.to_ascii_uppercase() - b'A'))),
        _ => bail!("bad broker '{text}': expected a letter, an index or none"),
    }
}

fn stream_demo(a: StreamDemoArgs) -> Result<()> {
    let config = DemoConfig {
        brokers: a.brokers,
        replication: a.replication,
        partitions: a.partitions,
        events: a.events,
        fail: parse_broker(&a.fail)?,
    };
    let report = run_demo(&config)?;
    println!("{report}");
    if report.unavailable > 0 {
        bail!("{} produce calls were refused: no live replica for their partition", report.unavailable);
    }
    if report.lost > 0 || report.duplicates > 0 || !report.fifo || !report.replicas_consistent {
        bail!("delivery guarantees violated");
    }
    Ok(())
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let store = match &a.ontology {
        Some(path) => load_file(path, &ParseOptions::default())?,
        None => load_sample_ontology(),
    };
    let summary = summarize_ontology(&store)?;
    if summary.classes == 0 {
        // Nothing to divide by: report the zero counts instead of failing.
        println!("classes 0, properties 0, individuals 0, axioms {}", summary.axioms);
        println!("note: no classes; metrics are undefined and reported as 0");
        return Ok(());
    }
    let m = compute_metrics(&summary)?;
    match a.format.as_str() {
        "csv" => print!("{}", m.to_csv()),
        "text" => {
            println!(
                "classes {}  data properties {}  object properties {}  individuals {}  subclass axioms {}  axioms {}",
                summary.classes,
                summary.data_properties,
                summary.object_properties,
                summary.individuals,
                summary.subclass_axioms,
                summary.axioms
            );
            print!("{m}");
        }
        other => bail!("unknown output format '{other}' (expected text or csv)"),
    }
    Ok(())
}
