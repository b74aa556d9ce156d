//! Domain-similarity diagnostics between source, generated, and target
//! retrieval collections.
//!
//! The library measures how close a set of generated queries sits to the
//! source and test domains (weighted-Jaccard vocabulary overlap over top-K
//! term profiles, query-type distribution entropy and cross-entropy,
//! corpus size), evaluates NDCG@10 improvement of an adapted run over a
//! base run, and reports per-factor Spearman correlations against that
//! improvement across datasets.

pub mod corpus_io;
pub mod correlation;
pub mod error;
pub mod factors;
pub mod manifest;
pub mod pipeline;
pub mod query_typing;
pub mod report;
pub mod retrieval_eval;
pub mod text_stats;

pub use error::{Error, Result};
