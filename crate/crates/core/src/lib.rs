//! Semantic complex event processing over vital-sign streams.
//!
//! - [`rdf`]: terms, an indexed triple store, N-Triples and Turtle I/O,
//!   subject-hash partitioning.
//! - [`csv2rdf`]: PPG recordings to RDF with gap repair.
//! - [`query`]: a SPARQL subset executed as map/group/reduce over chunks.
//! - [`thresholds`]: moving-average threshold models and clinical ranges,
//!   generic over `f32`/`f64`.
//! - [`cep`]: rule DSL, event engine, windows and the cohort classifier.
//! - [`bus`]: replicated partitioned log with an exactly-once file sink.
//! - [`kb`]: bundled drug/disease knowledge base and ontology metrics.

pub mod bus;
pub mod cep;
pub mod csv2rdf;
pub mod kb;
pub mod query;
pub mod rdf;
pub mod scalar;
pub mod thresholds;

pub use scalar::Scalar;

pub type ThresholdModelF64 = thresholds::ThresholdModel<f64>;
pub type ThresholdModelF32 = thresholds::ThresholdModel<f32>;
pub type RangeTableF64 = thresholds::RangeTable<f64>;
pub type RangeTableF32 = thresholds::RangeTable<f32>;
pub type ClinicalRangeF64 = thresholds::ClinicalRange<f64>;
pub type ClinicalRangeF32 = thresholds::ClinicalRange<f32>;
pub type SampleHistoryF64 = thresholds::SampleHistory<f64>;
pub type SampleHistoryF32 = thresholds::SampleHistory<f32>;
pub type EwmaAccumulatorF64 = thresholds::EwmaAccumulator<f64>;
pub type EwmaAccumulatorF32 = thresholds::EwmaAccumulator<f32>;
