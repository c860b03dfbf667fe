//! Crate-wide error type. Contract violations on hot counting paths (universe
//! mixing, out-of-range vertices) panic via assertions instead; everything an
//! end user or caller can trigger through data comes through here.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("density undefined: bipartite pair has an empty side")]
    EmptySide,

    #[error("pair sides {a}x{b} exceed the exhaustive limit {limit}; use the codegree certificate instead")]
    ExhaustiveLimit { a: usize, b: usize, limit: usize },

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("instance invariant violated: {0}")]
    Invariant(String),

    #[error("preprocessing failed: {0}")]
    Preprocess(String),

    #[error("selection exhausted at t={t} for pattern vertex {vertex}: {histogram}")]
    SelectionExhausted {
        t: usize,
        vertex: usize,
        histogram: crate::embed::FailureHistogram,
    },

    #[error("no system of distinct representatives in cluster {cluster}: witness of {witness_size} vertices covers only {union_size} hosts")]
    NoSdr {
        cluster: usize,
        witness_size: usize,
        union_size: usize,
        witness: Vec<usize>,
    },

    #[error("batched round failed: {0}")]
    Batch(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit-code class: 1 for algorithmic failures, 2 for usage/format errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SelectionExhausted { .. }
            | Error::NoSdr { .. }
            | Error::Batch(_)
            | Error::Preprocess(_) => 1,
            _ => 2,
        }
    }
}
