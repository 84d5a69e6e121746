//! In-process partitioned, replicated log with broker fault injection and
//! an exactly-once file sink.

mod cluster;
mod demo;
mod sink;

use thiserror::Error;

pub use cluster::{broker_name, Cluster, ConsumerPosition, Delivered, Record, Topic};
pub use demo::{run_demo, DemoConfig, DemoReport};
pub use sink::{FailPoint, FileSink, Manifest, SinkBatch};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BusError {
    #[error("unknown topic '{0}'")]
    UnknownTopic(String),
    #[error("topic '{0}' already exists")]
    TopicExists(String),
    #[error("unknown broker {0}")]
    UnknownBroker(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("partition {partition} of '{topic}' has no live in-sync replica")]
    Unavailable { topic: String, partition: usize },
    #[error("injected crash at {0:?}")]
    InjectedCrash(FailPoint),
    #[error("sink manifest: {0}")]
    Manifest(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for BusError {
    fn from(e: std::io::Error) -> Self {
        BusError::Io(e.to_string())
    }
}
