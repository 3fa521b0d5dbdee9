//! Agent-based simulation of language change on an adaptive network.
//!
//! Agents carry a vector of `F` discrete traits with `q` values each and sit
//! on an undirected simple graph. Pairs with partial trait overlap imitate
//! each other; pairs with zero overlap rewire the connecting edge, by default
//! only towards nodes two hops away. The crate provides the graph layer
//! ([`graph`]), the dynamics ([`model`]), partition and topology observables
//! ([`metrics`]), an ensemble sweep harness ([`experiments`]), and a
//! country-level language/population aggregation pipeline ([`empirical`]).

pub mod empirical;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod model;

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
