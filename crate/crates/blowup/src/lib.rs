//! Constructive embedding of bounded-degree spanning subgraphs into
//! super-regular blow-up host graphs.
//!
//! The crate builds instances (a cluster graph blown up into super-regular
//! pairs, plus a pattern graph with a cluster assignment), runs the two-phase
//! embedding algorithm (greedy phase with candidate-set maintenance and
//! buffer vertices, then completion through systems of distinct
//! representatives), certifies regularity, and verifies embeddings. A batched
//! variant embeds groups of far-apart vertices per round, mirroring a
//! round-synchronous parallel execution.

pub mod batch;
pub mod embed;
pub mod error;
pub mod files;
pub mod graph;
pub mod instance;
pub mod matching;
pub mod params;
pub mod rat;
pub mod regularity;
pub mod seeds;

pub use error::{Error, Result};
pub use graph::{BipartitePair, Graph, Universe, UniverseKind, VertexSet};
pub use instance::{Instance, PatternGraph, Restriction};
pub use params::ParameterCascade;
pub use rat::Rat;
pub use regularity::{ClusterGraph, HostGraph};
