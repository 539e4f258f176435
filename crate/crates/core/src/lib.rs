//! Query ambiguity prediction from retrieved-passage coherency.
//!
//! A query is run against a BM25 index, every ordered pair of retrieved
//! passages is scored by a successor predictor, and the resulting directed
//! "coherency network" is summarised by its node connectivity (NC) and
//! average node connectivity (ANC). Poorly connected networks indicate
//! retrieved passages that talk about unrelated things, which is taken as
//! evidence that the query needs a clarifying question.
//!
//! The crate also ships the post-retrieval QPP baselines (WIG, NQC, SMV,
//! n(σ%)) and the evaluation harness (ROC/AUC, paired bootstrap
//! significance, depth sweeps and AmbigNQ bucket reports).

pub mod checksum;
pub mod corpus;
pub mod edges;
pub mod eval;
pub mod graph;
pub mod pipeline;
pub mod qpp;

pub use corpus::{Bm25Params, Index, Passage, Query, RankedList};
pub use edges::{EdgeMatrix, PairScoreSet, SuccessorScorer};
pub use graph::{CoherencyNetwork, ConnectivityReport};
