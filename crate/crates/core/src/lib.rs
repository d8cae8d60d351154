//! Active learning for node classification: graphs, a two-layer GCN, a
//! catalog of query strategies, experiment protocols and dataset IO.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod experiment;
pub mod gcn;
pub mod graph;
pub mod metrics;
pub mod prob;
pub mod rank;
pub mod strategies;

pub use error::{Error, Result};
