//! Random (d,k)-regular hypergraphs: construction, uniform sampling through
//! bipartite biregular graphs, adjacency and non-backtracking spectra,
//! limiting spectral densities, random walk mixing and expansion checks.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expansion;
pub mod hypergraph;
pub mod linalg;
pub mod nbops;
pub mod quadrature;
pub mod sampler;
pub mod spectra;
pub mod walks;

pub use error::{Error, Result};
pub use hypergraph::{build_hypergraph, BipartiteGraph, Hypergraph};
pub use linalg::DenseMatrix;
pub use sampler::{sample_bipartite_biregular, sample_regular_hypergraph, SampleConfig, SampleMethod};
