//! Bundled drug/disease knowledge base, a seeded generator for larger ones,
//! and ontology schema metrics.

mod generate;
mod metrics;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::query::{execute_reference, parse_query};
use crate::rdf::vocab::{ppg, RDFS_LABEL, RDF_TYPE};
use crate::rdf::{load_store, ParseOptions, RdfError, RdfFormat, Term, TripleStore};

pub use generate::{generate_clinical_dataset, generate_kb, ClinicalDataset};
pub use metrics::{compute_metrics, summarize_ontology, OntologySummary, SchemaMetrics};

const SAMPLE_KB: &str = include_str!("../../data/kb.ttl");
const SAMPLE_ONTOLOGY: &str = include_str!("../../data/ssn_ontology.ttl");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KbError {
    #[error("subclass cycle through {0}")]
    Cycle(String),
    #[error("metrics undefined: {0}")]
    UndefinedMetrics(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("knowledge base invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

/// The bundled sample: 81 diseases with treating and recommended drugs, and
/// drug side effects.
pub fn load_sample_kb() -> TripleStore {
    load_store(SAMPLE_KB, RdfFormat::Turtle, &ParseOptions::default()).expect("bundled KB parses")
}

pub fn sample_kb_turtle() -> &'static str {
    SAMPLE_KB
}

/// The bundled SSN-subset schema used for the metrics report.
pub fn load_sample_ontology() -> TripleStore {
    load_store(SAMPLE_ONTOLOGY, RdfFormat::Turtle, &ParseOptions::default()).expect("bundled ontology parses")
}

/// One disease with its drugs, labels resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbEntry {
    pub disease: Term,
    pub label: String,
    pub treated_by: Vec<Term>,
    pub recommended_medication: Vec<Term>,
}

fn label_of(store: &TripleStore, t: &Term) -> Option<String> {
    let p = Term::Iri(RDFS_LABEL.to_string());
    store.matching(Some(t), Some(&p), None).into_iter().map(|tr| tr.object.value_str().to_string()).min()
}

fn objects(store: &TripleStore, s: &Term, p: &str) -> Vec<Term> {
    let p = Term::Iri(ppg(p));
    let set: BTreeSet<Term> = store.matching(Some(s), Some(&p), None).into_iter().map(|t| t.object.clone()).collect();
    set.into_iter().collect()
}

/// Entries for every subject typed as a disease, in IRI order.
pub fn entries(store: &TripleStore) -> Vec<KbEntry> {
    let ty = Term::Iri(RDF_TYPE.to_string());
    let disease_class = Term::Iri(ppg("Disease"));
    let diseases: BTreeSet<Term> =
        store.matching(None, Some(&ty), Some(&disease_class)).into_iter().map(|t| t.subject.clone()).collect();
    diseases
        .into_iter()
        .map(|d| KbEntry {
            label: label_of(store, &d).unwrap_or_default(),
            treated_by: objects(store, &d, "treatedBy"),
            recommended_medication: objects(store, &d, "recommendedMedication"),
            disease: d,
        })
        .collect()
}

/// Checks that every drug reference points at a typed drug and every
/// subject with drug links is a typed disease, using validation queries.
pub fn validate_kb(store: &TripleStore) -> Result<(), KbError> {
    for pred in ["treatedBy", "recommendedMedication"] {
        let all = parse_query(&format!("SELECT ?d ?x WHERE {{ ?d SSN:{pred} ?x }}")).expect("static query");
        let typed = parse_query(&format!(
            "SELECT ?d ?x WHERE {{ ?d SSN:{pred} ?x . ?d rdf:type SSN:Disease . ?x rdf:type SSN:Drug }}"
        ))
        .expect("static query");
        let all = execute_reference(store, &all);
        let typed = execute_reference(store, &typed);
        if all != typed {
            let bad = all.rows.iter().find(|r| !typed.rows.contains(r)).expect("sets differ");
            return Err(KbError::Invariant(format!("{} {pred} {} lacks Disease/Drug typing", bad[0], bad[1])));
        }
    }
    Ok(())
}
