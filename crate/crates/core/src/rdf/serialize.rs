use std::collections::BTreeMap;
use std::fmt::Write;

use super::store::TripleStore;
use super::term::{escape_literal, Term, Triple};
use super::vocab::{RDF_TYPE, SERIALIZE_PREFIXES, XSD_INTEGER, XSD_STRING};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdfFormat {
    NTriples,
    Turtle,
}

impl std::str::FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nt" | "ntriples" | "n-triples" => Ok(RdfFormat::NTriples),
            "ttl" | "turtle" => Ok(RdfFormat::Turtle),
            other => Err(format!("unknown RDF format '{other}'")),
        }
    }
}

impl RdfFormat {
    /// Guess from a file extension; defaults to Turtle.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("nt") => RdfFormat::NTriples,
            _ => RdfFormat::Turtle,
        }
    }
}

/// Serializes a store. Output is sorted, so equal stores serialize identically.
pub fn serialize(store: &TripleStore, format: RdfFormat) -> String {
    let mut triples: Vec<&Triple> = store.iter().collect();
    triples.sort();
    match format {
        RdfFormat::NTriples => {
            let mut out = String::new();
            for t in triples {
                let _ = writeln!(out, "{t}");
            }
            out
        }
        RdfFormat::Turtle => turtle(&triples),
    }
}

fn turtle(triples: &[&Triple]) -> String {
    let mut out = String::new();
    for (prefix, ns) in SERIALIZE_PREFIXES {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    let mut by_subject: BTreeMap<&Term, BTreeMap<&Term, Vec<&Term>>> = BTreeMap::new();
    for t in triples {
        by_subject.entry(&t.subject).or_default().entry(&t.predicate).or_default().push(&t.object);
    }
    for (subject, predicates) in by_subject {
        out.push('\n');
        out.push_str(&compact(subject));
        let count = predicates.len();
        for (i, (predicate, objects)) in predicates.into_iter().enumerate() {
            let verb = if predicate.as_iri() == Some(RDF_TYPE) { "a".to_string() } else { compact(predicate) };
            let objects: Vec<String> = objects.into_iter().map(compact).collect();
            let sep = if i == 0 { " " } else { "    " };
            let end = if i + 1 == count { " ." } else { " ;" };
            let _ = writeln!(out, "{sep}{verb} {}{end}", objects.join(" , "));
        }
    }
    out
}

fn compact(term: &Term) -> String {
    match term {
        Term::Iri(iri) => compact_iri(iri).unwrap_or_else(|| format!("<{iri}>")),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, datatype } => {
            if datatype == XSD_INTEGER && is_plain_integer(lexical) {
                return lexical.clone();
            }
            let body = format!("\"{}\"", escape_literal(lexical));
            if datatype == XSD_STRING {
                body
            } else {
                let dt = compact_iri(datatype).unwrap_or_else(|| format!("<{datatype}>"));
                format!("{body}^^{dt}")
            }
        }
    }
}

fn compact_iri(iri: &str) -> Option<String> {
    SERIALIZE_PREFIXES.iter().find_map(|(prefix, ns)| {
        let local = iri.strip_prefix(ns)?;
        let safe = !local.is_empty()
            && local.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        safe.then(|| format!("{prefix}:{local}"))
    })
}

fn is_plain_integer(lexical: &str) -> bool {
    let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}
