//! Connectivity laboratory for sparse random digraphs.
//!
//! Strongly connected components and their giant, the pair counters that
//! decide whether the giant is determined by local structure, forward-backward
//! neighborhood censuses, and the branching-process limit values these
//! quantities converge to.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod analysis;
pub mod digraph;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod law;
pub mod local;
pub mod reach;
pub mod rng;
pub mod scc;
pub mod theory;

pub use digraph::Digraph;
pub use error::{Error, Result};
pub use law::DegreeLaw;
pub use scc::SccDecomposition;
