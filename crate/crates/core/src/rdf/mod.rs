//! RDF data model, N-Triples / Turtle-subset I/O and the indexed triple store.

mod ntriples;
mod serialize;
mod store;
mod term;
mod turtle;
pub mod vocab;

use thiserror::Error;

pub use ntriples::{parse_ntriples, parse_ntriples_with};
pub use serialize::{serialize, RdfFormat};
pub(crate) use store::fnv1a;
pub use store::{merge, partition, ChunkedStore, PartitionStrategy, TripleStore};
pub use term::{Numeric, Term, Triple};
pub use turtle::{parse_turtle_subset, parse_turtle_with};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdfError {
    #[error("parse error at line {line}: {message}: {text}")]
    Parse { line: usize, message: String, text: String },
    #[error("unknown prefix '{prefix}:' at line {line}")]
    UnknownPrefix { prefix: String, line: usize },
    #[error("unsupported feature at line {line}: {construct}")]
    Unsupported { construct: String, line: usize },
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Accept `http://Healthcare.org/ppg/` and `http://healthcare.org/ppg`
    /// and rewrite them to the canonical namespace.
    pub legacy_namespaces: bool,
}

/// Parses a document in either format.
pub fn parse(text: &str, format: RdfFormat, options: &ParseOptions) -> Result<Vec<Triple>, RdfError> {
    match format {
        RdfFormat::NTriples => parse_ntriples_with(text, options),
        RdfFormat::Turtle => parse_turtle_with(text, options),
    }
}

/// Parses a document straight into a store.
pub fn load_store(text: &str, format: RdfFormat, options: &ParseOptions) -> Result<TripleStore, RdfError> {
    Ok(parse(text, format, options)?.into_iter().collect())
}
