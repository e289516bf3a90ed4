//! Sublinear-time algorithms over adjacency-list graphs in which some list
//! entries have been erased by an adversary.
//!
//! - [`graph`]: the partially erased graph model and completions.
//! - [`peg`]: the `peg 1` text format.
//! - [`oracle`]: counted, budgeted query access and the nonerased-subgraph
//!   filter for bounded-degree graphs.
//! - [`connectedness`]: one-sided connectedness testers.
//! - [`avg_degree`]: the average-degree estimator.
//! - [`exact`]: brute-force ground truth for small graphs.
//! - [`instance_gen`]: lower-bound families, gadgets and random corpora.

pub mod avg_degree;
pub mod connectedness;
pub mod exact;
pub mod graph;
pub mod instance_gen;
pub mod oracle;
pub mod peg;
pub mod rational;
pub mod rng;

pub use graph::{AdjEntry, Completion, EdgeStatus, GraphError, PartiallyErasedGraph, VertexId, Violation};
pub use oracle::{Budget, BudgetScope, OracleError, QueryCounts, QuerySession};
pub use rational::{parse_rational, Rational};
