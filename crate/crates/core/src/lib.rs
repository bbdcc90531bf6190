//! Structural parameters, extremal-family constructions and G(n,p)
//! simulation for forbidden bipartite patterns that carry a vertex complete
//! to one side (an "apex").
//!
//! Modules:
//! - [`graph`]: graphs, multigraphs, parsing, embeddings, bipartitions
//! - [`density`]: 2-density m2, balancedness, proper-subgraph variant
//! - [`semibounded`]: triples (S,T,v*), f(nu), a(F), b(F), D(nu), tau
//! - [`constructions`]: the F_M and F_{r,s,t} families and balance checks
//! - [`supersat`]: greedy D-good embedding families and degree audits
//! - [`sim`]: G(n,p) sampling, exact/heuristic extremal numbers, predictions
//! - [`corpus`] / [`suites`]: exhaustive small-graph invariant sweeps

pub mod constructions;
pub mod corpus;
pub mod density;
pub mod error;
pub mod graph;
pub mod rational;
pub mod semibounded;
pub mod sim;
pub mod suites;
pub mod supersat;

pub use error::{Error, Result};
