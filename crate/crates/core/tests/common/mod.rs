//! Random stores and queries shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use semcep::rdf::vocab::{ppg, RDFS_LABEL, RDF_TYPE};
use semcep::rdf::{Term, Triple, TripleStore};

pub const CLASSES: &[&str] = &["Patient", "PPGData", "Disease", "Drug", "SideEffect"];
pub const NUMERIC: &[&str] = &["hasHeartRate", "hasSpO2", "hasHR", "hasRESP"];
pub const LINKS: &[&str] = &["takesMedication", "hasSideEffect", "treatedBy", "recommendedMedication"];
pub const CONDITIONS: &[&str] = &["Tachycardia", "Normal", "Hypoxemia"];
pub const LABELS: &[&str] = &["Hypoxemia", "Albuterol", "Headache", "Dry Nose"];

fn iri(local: &str) -> Term {
    Term::iri(ppg(local)).expect("valid IRI")
}

fn entity(i: usize) -> Term {
    iri(&format!("E{i}"))
}

/// Random store of at most `max` triples over the healthcare vocabulary.
/// The entity pool scales with the size so join fan-out stays modest.
pub fn random_store<R: Rng>(rng: &mut R, max: usize) -> TripleStore {
    let n = rng.gen_range(0..=max);
    let entities = (n / 4).max(3);
    let mut store = TripleStore::new();
    for _ in 0..n {
        let s = entity(rng.gen_range(0..entities));
        let (p, o) = match rng.gen_range(0..10) {
            0..=1 => (Term::iri(RDF_TYPE).unwrap(), iri(CLASSES.choose(rng).unwrap())),
            2..=4 => (iri(NUMERIC.choose(rng).unwrap()), Term::integer(rng.gen_range(50..=160))),
            5..=7 => (iri(LINKS.choose(rng).unwrap()), entity(rng.gen_range(0..entities))),
            8 => (iri("hasCondition"), Term::string(*CONDITIONS.choose(rng).unwrap())),
            _ => (Term::iri(RDFS_LABEL).unwrap(), Term::string(*LABELS.choose(rng).unwrap())),
        };
        store.insert(Triple::new(s, p, o).unwrap());
    }
    store
}

/// Random query in the supported grammar: a connected basic graph pattern
/// of one to four patterns, up to two filters and an optional LIMIT.
pub fn random_query<R: Rng>(rng: &mut R) -> String {
    let mut vars: Vec<String> = vec!["v0".into()];
    let mut numeric: Vec<String> = Vec::new();
    let mut patterns = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let subject = if rng.gen_bool(0.1) {
            format!("SSN:E{}", rng.gen_range(0..5))
        } else {
            format!("?{}", vars.choose(rng).unwrap())
        };
        let fresh = |vars: &mut Vec<String>| {
            let v = format!("v{}", vars.len());
            vars.push(v.clone());
            v
        };
        let pattern = match rng.gen_range(0..10) {
            0..=1 => format!("{subject} a SSN:{}", CLASSES.choose(rng).unwrap()),
            2..=4 => {
                let v = fresh(&mut vars);
                numeric.push(v.clone());
                format!("{subject} SSN:{} ?{v}", NUMERIC.choose(rng).unwrap())
            }
            5..=7 => {
                let object = if rng.gen_bool(0.5) { fresh(&mut vars) } else { vars.choose(rng).unwrap().clone() };
                format!("{subject} SSN:{} ?{object}", LINKS.choose(rng).unwrap())
            }
            8 => format!("{subject} SSN:hasCondition \"{}\"", CONDITIONS.choose(rng).unwrap()),
            _ => {
                let v = fresh(&mut vars);
                format!("{subject} ?{v} ?{}", vars[0])
            }
        };
        patterns.push(pattern);
    }
    // v0 must be bound; anchor it when no pattern used it
    let body = patterns.join(" . ");
    let mut body = if body.contains("?v0 ") || body.ends_with("?v0") {
        body
    } else {
        format!("?v0 a SSN:{} . {body}", CLASSES.choose(rng).unwrap())
    };
    let ops = ["<", "<=", ">", ">=", "=", "!="];
    for _ in 0..rng.gen_range(0..=2) {
        if let Some(v) = numeric.choose(rng) {
            let op = ops.choose(rng).unwrap();
            if rng.gen_bool(0.7) || numeric.len() < 2 {
                body.push_str(&format!(" FILTER(?{v} {op} {})", rng.gen_range(50..=160)));
            } else {
                body.push_str(&format!(" FILTER(?{v} {op} ?{})", numeric.choose(rng).unwrap()));
            }
        }
    }
    let bound: Vec<&String> =
        vars.iter().filter(|v| body.contains(&format!("?{v} ")) || body.ends_with(&format!("?{v}"))).collect();
    let select = if rng.gen_bool(0.2) {
        "*".to_string()
    } else {
        let k = rng.gen_range(1..=bound.len());
        bound.choose_multiple(rng, k).map(|v| format!("?{v}")).collect::<Vec<_>>().join(" ")
    };
    let limit = if rng.gen_bool(0.2) { format!(" LIMIT {}", rng.gen_range(0..20)) } else { String::new() };
    format!("SELECT {select} WHERE {{ {body} }}{limit}")
}
