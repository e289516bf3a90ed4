//! Shared fixtures for the benchmarks.

use peg_core::instance_gen::{erase, gen_connected_random, gen_far_forest, ErasureStrategy, FarForestSpec};
use peg_core::{PartiallyErasedGraph, Rational};

/// Connected random graph with average degree close to `davg`, with
/// `alpha` of its entries erased uniformly.
pub fn connected(n: usize, davg: f64, alpha: Rational, seed: u64) -> PartiallyErasedGraph {
    let m = ((n as f64 * davg / 2.0).round() as usize).max(n - 1);
    let g = gen_connected_random(n, m, seed).expect("connected fixture").graph;
    erase(&g, alpha, ErasureStrategy::Uniform, seed ^ 1).expect("erasure")
}

/// Certified `eps`-far forest.
pub fn far(n: usize, davg: f64, eps: Rational, alpha: Rational, seed: u64) -> PartiallyErasedGraph {
    let spec = FarForestSpec::new(eps, alpha, n, davg, ErasureStrategy::Uniform, seed);
    gen_far_forest(&spec).expect("far fixture").instance.graph
}

pub const SIZES: [usize; 3] = [1_000, 10_000, 100_000];
