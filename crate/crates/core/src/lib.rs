#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coding_paths;
pub mod config_explorer;
pub mod continuum_graph;
pub mod degree_model;
pub mod error;
pub mod experiments;
pub mod kv;
mod fenwick;
pub mod levy_sim;
pub mod rng;
mod simplex;

pub use error::{Error, Result};
pub use rng::Stream;
