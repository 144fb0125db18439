//! Exact machinery for maximum induced forests in G(n,p): seeded sampling,
//! an exact branch-and-bound solver with oracles, constrained Prüfer codecs,
//! forest-extension counts, exact rational moments with their concentration
//! window, and a Monte Carlo experiment harness.

pub mod bits;
pub mod coding;
pub mod counting;
pub mod error;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod moments;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use exact::{format_rational, parse_rational, Rational};
pub use graph::{sample_gnp, Graph, GnpParams};
pub use solver::{
    count_induced_rooted_forests, max_induced_forest, max_induced_forest_bruteforce, RootedForest,
    SolveResult, SolveStatus,
};
