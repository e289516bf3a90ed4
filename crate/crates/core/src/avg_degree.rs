//! Average-degree estimation over partially erased graphs.
//!
//! Vertices are ranked by `(degree, id)`. A sample picks a uniform vertex `u`
//! and a uniform entry of its list and credits `deg(u)` when the entry is
//! erased or names a higher-ranked vertex; twice the mean credit estimates the
//! average degree. Erased entries are always credited, so erased edges may be
//! counted from both sides and the estimate can overshoot by up to
//! `2·min(alpha, 1/2)·davg`.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{AdjEntry, PartiallyErasedGraph, VertexId};
use crate::oracle::{OracleError, QueryCounts, QuerySession};
use crate::rng::split_seed;

/// Relative slack on the high-degree threshold comparison, absorbing
/// floating-point error in `sqrt`.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// Constants of the estimator. [`Default`] gives the analysed values; other
/// values trade the accuracy guarantee for speed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimatorConstants {
    /// Multiplier in the sample count `ceil(c·ln(2/δ)·sqrt(n/(ε⁵·d̂)))`.
    pub sample_factor: f64,
    /// Multiplier in the high-degree threshold `c·sqrt(n·d̂/ε)`.
    pub threshold_factor: f64,
    /// Multiplier in the repetition count `ceil(c·ln(4·log2 n))`.
    pub repetition_factor: f64,
}

impl Default for EstimatorConstants {
    fn default() -> Self {
        Self {
            sample_factor: 660.0,
            threshold_factor: 4.0,
            repetition_factor: 12.0,
        }
    }
}

impl EstimatorConstants {
    /// Whether these are the analysed constants (and the guarantees apply).
    pub fn is_conforming(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Configuration of one refinement run around a crude estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeEstimatorConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// Crude estimate `d̂` of the average degree.
    pub crude: f64,
    pub seed: u64,
    pub constants: EstimatorConstants,
    /// Keep every per-sample credit in [`DegreeEstimate::trace`].
    pub record_trace: bool,
}

impl DegreeEstimatorConfig {
    pub fn new(epsilon: f64, delta: f64, crude: f64, seed: u64) -> Self {
        Self {
            epsilon,
            delta,
            crude,
            seed,
            constants: EstimatorConstants::default(),
            record_trace: false,
        }
    }

    fn check(&self) -> Result<(), EstimatorError> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(EstimatorError::Parameter(format!("epsilon {} not in (0, 1/2)", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0 / 3.0) {
            return Err(EstimatorError::Parameter(format!("delta {} not in (0, 1/3)", self.delta)));
        }
        if !(self.crude > 0.0 && self.crude.is_finite()) {
            return Err(EstimatorError::Parameter(format!("crude estimate {} must be positive", self.crude)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeEstimate {
    pub value: f64,
    /// Samples drawn in total (across repetitions for the driver).
    pub samples_used: u64,
    pub queries: QueryCounts,
    /// Per-sample credits of a single refinement run, when recorded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<u64>>,
    /// Driver iteration `i` that returned (`None` for a single refinement
    /// run); `ceil(log2 n) + 1` when the driver fell through to 1.
    pub iteration: Option<u32>,
    /// Crude estimate in force when the value was produced.
    pub crude_used: f64,
    pub seed: u64,
}

/// Position of a vertex in the degree-then-id order; the derived `Ord`
/// compares `degree` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexRank {
    pub degree: usize,
    pub id: VertexId,
}

pub fn rank(g: &PartiallyErasedGraph, u: VertexId) -> VertexRank {
    VertexRank {
        degree: g.adj(u).len(),
        id: u,
    }
}

/// Nonerased entries of `adj(u)` that rank above `u`.
pub fn d_plus(g: &PartiallyErasedGraph, u: VertexId) -> usize {
    let ru = rank(g, u);
    g.adj(u)
        .iter()
        .filter_map(|e| e.vertex())
        .filter(|&v| ru < rank(g, v))
        .count()
}

/// Erased entries of `adj(u)`.
pub fn d_bot(g: &PartiallyErasedGraph, u: VertexId) -> usize {
    g.erased_in(u)
}

pub fn sample_count(n: usize, epsilon: f64, delta: f64, crude: f64, c: &EstimatorConstants) -> u64 {
    (c.sample_factor * (2.0 / delta).ln() * (n as f64 / (epsilon.powi(5) * crude)).sqrt()).ceil() as u64
}

pub fn degree_threshold(n: usize, crude: f64, epsilon: f64, c: &EstimatorConstants) -> f64 {
    c.threshold_factor * (n as f64 * crude / epsilon).sqrt()
}

/// Whether `degree` counts as low for the given threshold.
pub fn is_low_degree(degree: usize, threshold: f64) -> bool {
    degree as f64 <= threshold * (1.0 + THRESHOLD_SLACK)
}

/// One credit sample.
pub fn chi_sample(s: &mut QuerySession<'_>, cfg: &DegreeEstimatorConfig) -> Result<u64, OracleError> {
    let threshold = degree_threshold(s.num_vertices(), cfg.crude, cfg.epsilon, &cfg.constants);
    let u = s.sample_vertex();
    let du = s.q_degree(u)?;
    let entry = match s.q_random_neighbor(u)? {
        None => return Ok(0),
        Some(e) => e,
    };
    let credited = match entry {
        AdjEntry::Erased => true,
        AdjEntry::Vertex(v) => {
            let dv = s.q_degree(v)?;
            VertexRank { degree: du, id: u } < VertexRank { degree: dv, id: v }
        }
    };
    Ok(if credited && is_low_degree(du, threshold) {
        du as u64
    } else {
        0
    })
}

/// Refines a crude estimate `cfg.crude` into `2·mean(credits)`.
pub fn refine_estimate(g: &PartiallyErasedGraph, cfg: &DegreeEstimatorConfig) -> Result<DegreeEstimate, EstimatorError> {
    cfg.check()?;
    let mut s = QuerySession::new(g, cfg.seed);
    let samples = sample_count(g.num_vertices(), cfg.epsilon, cfg.delta, cfg.crude, &cfg.constants).max(1);
    let mut trace = cfg.record_trace.then(|| Vec::with_capacity(samples as usize));
    let mut sum: u64 = 0;
    for _ in 0..samples {
        let chi = chi_sample(&mut s, cfg)?;
        sum += chi;
        if let Some(t) = trace.as_mut() {
            t.push(chi);
        }
    }
    Ok(DegreeEstimate {
        value: 2.0 * sum as f64 / samples as f64,
        samples_used: samples,
        queries: s.counts(),
        trace,
        iteration: None,
        crude_used: cfg.crude,
        seed: cfg.seed,
    })
}

/// Driver configuration: the doubling search over crude estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriverConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub constants: EstimatorConstants,
}

impl DriverConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            constants: EstimatorConstants::default(),
        }
    }
}

/// Refinement runs per crude estimate, `ceil(c·ln(4·log2 n))`.
pub fn repetitions(n: usize, c: &EstimatorConstants) -> u32 {
    (c.repetition_factor * (4.0 * (n as f64).log2()).ln()).ceil().max(1.0) as u32
}

/// Lower median of a nonempty slice.
pub fn lower_median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

pub fn estimate_avg_degree(g: &PartiallyErasedGraph, epsilon: f64, seed: u64) -> Result<DegreeEstimate, EstimatorError> {
    estimate_avg_degree_with(g, &DriverConfig::new(epsilon, seed))
}

/// Tries `d̂ = n, n/2, n/4, …` and returns the first median refinement that
/// exceeds its crude estimate, or 1 if none does.
///
/// Refinement run `j` of iteration `i` uses seed
/// `split_seed(split_seed(seed, i), j)`.
pub fn estimate_avg_degree_with(g: &PartiallyErasedGraph, cfg: &DriverConfig) -> Result<DegreeEstimate, EstimatorError> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(EstimatorError::Parameter("the estimator needs at least two vertices".into()));
    }
    let reps = repetitions(n, &cfg.constants);
    let last = (n as f64).log2().ceil() as u32;
    let mut queries = QueryCounts::default();
    let mut samples_used = 0;
    for i in 0..=last {
        let crude = n as f64 / 2f64.powi(i as i32);
        let iter_seed = split_seed(cfg.seed, i as u64);
        let mut values = Vec::with_capacity(reps as usize);
        for j in 0..reps {
            let run = DegreeEstimatorConfig {
                constants: cfg.constants,
                ..DegreeEstimatorConfig::new(cfg.epsilon, 0.25, crude, split_seed(iter_seed, j as u64))
            };
            let est = refine_estimate(g, &run)?;
            queries.degree += est.queries.degree;
            queries.neighbor += est.queries.neighbor;
            queries.random_draws += est.queries.random_draws;
            queries.implicit_degree += est.queries.implicit_degree;
            samples_used += est.samples_used;
            values.push(est.value);
        }
        let median = lower_median(&mut values);
        if median > crude {
            return Ok(DegreeEstimate {
                value: median,
                samples_used,
                queries,
                trace: None,
                iteration: Some(i),
                crude_used: crude,
                seed: cfg.seed,
            });
        }
    }
    Ok(DegreeEstimate {
        value: 1.0,
        samples_used,
        queries,
        trace: None,
        iteration: Some(last + 1),
        crude_used: n as f64 / 2f64.powi(last as i32),
        seed: cfg.seed,
    })
}
