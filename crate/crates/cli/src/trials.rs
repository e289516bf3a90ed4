use std::collections::HashSet;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use peg_core::avg_degree::{
    degree_threshold, estimate_avg_degree_with, is_low_degree, refine_estimate, DegreeEstimate, DegreeEstimatorConfig,
    DriverConfig, EstimatorConstants,
};
use peg_core::connectedness::{
    run_tester, unknown_davg_budget, Algorithm, ConnTesterConfig, SmallAlphaSchedule, TesterVerdict, Verdict,
};
use peg_core::exact::{exact_exp_chi, inventory_witnesses};
use peg_core::rational::{parse_rational, to_f64};
use peg_core::rng::split_seed;
use peg_core::{PartiallyErasedGraph, VertexId};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{emit, read_graph, thread_pool, Quantiles};
use crate::{RunFlags, Status};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoArg {
    SmallAlpha,
    MidAlpha,
    NoErasure,
    UnknownDavg,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::SmallAlpha => Algorithm::SmallAlpha,
            AlgoArg::MidAlpha => Algorithm::MidAlpha,
            AlgoArg::NoErasure => Algorithm::NoErasure,
            AlgoArg::UnknownDavg => Algorithm::UnknownDavg,
        }
    }
}

#[derive(Args, Debug)]
pub struct TestConnArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Promised average degree; defaults to the graph's own.
    #[arg(long)]
    pub davg: Option<f64>,
    /// Run the small-alpha tester without its abort cap.
    #[arg(long)]
    pub no_cap: bool,
    /// Check every rejection against the exact witness inventory and every
    /// trial against its query cap; exit 1 on a violation.
    #[arg(long)]
    pub self_check: bool,
    #[command(flatten)]
    pub run: RunFlags,
}

/// Column order: trial, seed, verdict, witness_size, aborted,
/// degree_queries, neighbor_queries, random_draws, total_queries, wall_us.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ConnRecord {
    pub trial: u64,
    pub seed: u64,
    pub verdict: Verdict,
    pub witness_size: Option<usize>,
    pub aborted: bool,
    pub degree_queries: u64,
    pub neighbor_queries: u64,
    pub random_draws: u64,
    pub total_queries: u64,
    pub wall_us: Option<u64>,
}

#[derive(Serialize, Debug)]
struct ConnPlan {
    input: String,
    algorithm: AlgoArg,
    epsilon: f64,
    alpha: f64,
    davg: f64,
    enforce_cap: bool,
    trials: u64,
    seed: u64,
    cap: Option<u64>,
}

#[derive(Serialize, Debug)]
pub struct ConnSummary {
    pub trials: u64,
    pub rejections: u64,
    pub rejection_frequency: f64,
    pub aborts: u64,
    pub total_queries: Quantiles,
    pub neighbor_queries: Quantiles,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_check_violations: Option<usize>,
}

pub fn conn_record(trial: u64, seed: u64, v: &TesterVerdict, wall_us: Option<u64>) -> ConnRecord {
    ConnRecord {
        trial,
        seed,
        verdict: v.verdict,
        witness_size: v.witness.as_ref().map(|w| w.vertices.len()),
        aborted: v.aborted,
        degree_queries: v.queries.degree,
        neighbor_queries: v.queries.neighbor,
        random_draws: v.queries.random_draws,
        total_queries: v.queries.total(),
        wall_us,
    }
}

/// Runs `trials` seeded tester runs in parallel, in trial order.
pub fn conn_trials(
    g: &PartiallyErasedGraph,
    algo: Algorithm,
    cfg: &ConnTesterConfig,
    trials: u64,
    timing: bool,
) -> Result<Vec<(ConnRecord, TesterVerdict)>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = split_seed(cfg.seed, t);
            let start = Instant::now();
            let v = run_tester(algo, g, &ConnTesterConfig { seed, ..*cfg })?;
            let wall = timing.then(|| start.elapsed().as_micros() as u64);
            Ok((conn_record(t, seed, &v, wall), v))
        })
        .collect()
}

pub fn warn_davg(g: &PartiallyErasedGraph, davg: f64) {
    let actual = g.average_degree();
    if (davg - actual).abs() > 1e-9 * actual.max(1.0) {
        eprintln!("warning: supplied average degree {davg} differs from the graph's {actual}; using the supplied value");
    }
}

fn self_check_conn(g: &PartiallyErasedGraph, algo: Algorithm, cfg: &ConnTesterConfig, runs: &[(ConnRecord, TesterVerdict)]) -> usize {
    let inv = inventory_witnesses(g);
    let plain: HashSet<&[VertexId]> = inv.plain.iter().map(|c| c.as_slice()).collect();
    let generalized: HashSet<&[VertexId]> = inv.generalized.iter().map(|w| w.vertices.as_slice()).collect();
    let mut bad = 0;
    for (rec, v) in runs {
        let mut ok = match (&v.witness, algo) {
            (None, _) => true,
            (Some(w), Algorithm::MidAlpha) => generalized.contains(w.vertices.as_slice()),
            (Some(w), _) => plain.contains(w.vertices.as_slice()),
        };
        ok &= !(v.aborted && v.rejected());
        if algo == Algorithm::SmallAlpha && cfg.enforce_cap {
            ok &= v.cap.is_none_or(|c| rec.total_queries <= c);
        }
        if algo == Algorithm::UnknownDavg {
            ok &= rec.neighbor_queries <= unknown_davg_budget(cfg.epsilon - 2.0 * cfg.alpha);
        }
        if !ok {
            eprintln!("self-check: trial {} (seed {}) violates a tester guarantee", rec.trial, rec.seed);
            bad += 1;
        }
    }
    bad
}

pub fn run_test_conn(a: &TestConnArgs) -> Result<Status> {
    let g = read_graph(&a.input)?;
    let davg = a.davg.unwrap_or_else(|| g.average_degree());
    if a.davg.is_some() {
        warn_davg(&g, davg);
    }
    let algo: Algorithm = a.algo.into();
    let cfg = ConnTesterConfig {
        enforce_cap: !a.no_cap,
        ..ConnTesterConfig::new(a.eps, a.alpha, Some(davg), a.run.seed)
    };
    // reject bad parameters before spawning trials
    run_tester(algo, &g, &ConnTesterConfig { seed: 0, ..cfg })?;
    let pool = thread_pool(a.run.threads)?;
    let runs = pool.install(|| conn_trials(&g, algo, &cfg, a.run.trials, a.run.timing))?;
    let violations = a.self_check.then(|| self_check_conn(&g, algo, &cfg, &runs));
    let records: Vec<ConnRecord> = runs.into_iter().map(|(r, _)| r).collect();
    let rejections = records.iter().filter(|r| r.verdict == Verdict::Reject).count() as u64;
    let summary = ConnSummary {
        trials: a.run.trials,
        rejections,
        rejection_frequency: rejections as f64 / a.run.trials.max(1) as f64,
        aborts: records.iter().filter(|r| r.aborted).count() as u64,
        total_queries: Quantiles::of(records.iter().map(|r| r.total_queries)),
        neighbor_queries: Quantiles::of(records.iter().map(|r| r.neighbor_queries)),
        self_check_violations: violations,
    };
    let cap = match algo {
        Algorithm::SmallAlpha if cfg.enforce_cap => Some(SmallAlphaSchedule::new(a.eps, a.alpha, davg).cap),
        Algorithm::UnknownDavg => Some(unknown_davg_budget(a.eps - 2.0 * a.alpha)),
        _ => None,
    };
    let plan = ConnPlan {
        input: a.input.display().to_string(),
        algorithm: a.algo,
        epsilon: a.eps,
        alpha: a.alpha,
        davg,
        enforce_cap: cfg.enforce_cap,
        trials: a.run.trials,
        seed: a.run.seed,
        cap,
    };
    emit(&a.run, &plan, &summary, &records)?;
    Ok(match violations {
        Some(k) if k > 0 => Status::Violations(k),
        _ => Status::Ok,
    })
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    /// Doubling search over crude estimates.
    Driver,
    /// A single refinement run around `--dhat`.
    Refine,
}

#[derive(Args, Debug, Clone)]
pub struct EstimatorFlags {
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = EstimateMode::Driver)]
    pub mode: EstimateMode,
    /// Crude estimate for `--mode refine`.
    #[arg(long)]
    pub dhat: Option<f64>,
    /// Failure probability for `--mode refine`.
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Override the sample-count constant (voids the accuracy guarantee).
    #[arg(long)]
    pub sample_factor: Option<f64>,
    /// Override the high-degree threshold constant.
    #[arg(long)]
    pub threshold_factor: Option<f64>,
    /// Override the repetition-count constant.
    #[arg(long)]
    pub repetition_factor: Option<f64>,
}

impl EstimatorFlags {
    pub fn constants(&self) -> EstimatorConstants {
        let d = EstimatorConstants::default();
        let c = EstimatorConstants {
            sample_factor: self.sample_factor.unwrap_or(d.sample_factor),
            threshold_factor: self.threshold_factor.unwrap_or(d.threshold_factor),
            repetition_factor: self.repetition_factor.unwrap_or(d.repetition_factor),
        };
        if !c.is_conforming() {
            eprintln!("warning: estimator constants overridden; the accuracy guarantee does not apply");
        }
        c
    }

    pub fn check(&self) -> Result<()> {
        if self.mode == EstimateMode::Refine && self.dhat.is_none() {
            bail!("--mode refine needs --dhat");
        }
        Ok(())
    }

    pub fn run_once(&self, g: &PartiallyErasedGraph, c: EstimatorConstants, seed: u64) -> Result<DegreeEstimate> {
        Ok(match self.mode {
            EstimateMode::Driver => estimate_avg_degree_with(
                g,
                &DriverConfig {
                    constants: c,
                    ..DriverConfig::new(self.eps, seed)
                },
            )?,
            EstimateMode::Refine => refine_estimate(
                g,
                &DegreeEstimatorConfig {
                    constants: c,
                    ..DegreeEstimatorConfig::new(self.eps, self.delta, self.dhat.unwrap_or(1.0), seed)
                },
            )?,
        })
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub est: EstimatorFlags,
    /// With `--mode refine`: check the mean against the exact expectation
    /// (4 sigma); exit 1 if it is off.
    #[arg(long)]
    pub self_check: bool,
    #[command(flatten)]
    pub run: RunFlags,
}

/// Column order: trial, seed, estimate, iteration, crude_used, samples,
/// degree_queries, neighbor_queries, random_draws, implicit_degree,
/// total_queries, wall_us.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub trial: u64,
    pub seed: u64,
    pub estimate: f64,
    pub iteration: Option<u32>,
    pub crude_used: f64,
    pub samples: u64,
    pub degree_queries: u64,
    pub neighbor_queries: u64,
    pub random_draws: u64,
    /// Degree queries charged inside random-neighbor draws (already in
    /// `degree_queries`).
    pub implicit_degree: u64,
    pub total_queries: u64,
    pub wall_us: Option<u64>,
}

#[derive(Serialize, Debug)]
struct EstimatePlan {
    input: String,
    mode: EstimateMode,
    epsilon: f64,
    delta: Option<f64>,
    dhat: Option<f64>,
    constants: EstimatorConstants,
    conforming: bool,
    trials: u64,
    seed: u64,
}

#[derive(Serialize, Debug)]
struct EstimateSummary {
    trials: u64,
    average_degree: f64,
    mean: f64,
    median: f64,
    std_dev: f64,
    /// Fraction of estimates in `((1 − ε)·d̄, (1 + ε)·d̄)`.
    within_eps: f64,
    total_queries: Quantiles,
    /// `2·E[credit]` for the refinement run, computed exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_refine_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    four_sigma: Option<f64>,
}

pub fn estimate_record(trial: u64, seed: u64, e: &DegreeEstimate, wall_us: Option<u64>) -> EstimateRecord {
    EstimateRecord {
        trial,
        seed,
        estimate: e.value,
        iteration: e.iteration,
        crude_used: e.crude_used,
        samples: e.samples_used,
        degree_queries: e.queries.degree,
        neighbor_queries: e.queries.neighbor,
        random_draws: e.queries.random_draws,
        implicit_degree: e.queries.implicit_degree,
        total_queries: e.queries.total(),
        wall_us,
    }
}

pub fn estimate_trials(
    g: &PartiallyErasedGraph,
    est: &EstimatorFlags,
    c: EstimatorConstants,
    master: u64,
    trials: u64,
    timing: bool,
) -> Result<Vec<EstimateRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = split_seed(master, t);
            let start = Instant::now();
            let e = est.run_once(g, c, seed)?;
            Ok(estimate_record(t, seed, &e, timing.then(|| start.elapsed().as_micros() as u64)))
        })
        .collect()
}

pub fn run_estimate(a: &EstimateArgs) -> Result<Status> {
    a.est.check()?;
    let g = read_graph(&a.input)?;
    let c = a.est.constants();
    // parameter errors surface before the parallel section
    a.est.run_once(&g, EstimatorConstants { sample_factor: 1e-9, ..c }, 0)?;
    let pool = thread_pool(a.run.threads)?;
    let records = pool.install(|| estimate_trials(&g, &a.est, c, a.run.seed, a.run.trials, a.run.timing))?;

    let d = g.average_degree();
    let values: Vec<f64> = records.iter().map(|r| r.estimate).collect();
    let k = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len().saturating_sub(1) / 2).copied().unwrap_or(0.0);
    let eps = a.est.eps;
    let within = values.iter().filter(|&&v| v > (1.0 - eps) * d && v < (1.0 + eps) * d).count() as f64 / k;

    let (exact_mean, four_sigma) = match (a.est.mode, a.est.dhat) {
        (EstimateMode::Refine, Some(dhat)) => {
            let dh = parse_rational(&format!("{dhat}"))?;
            let e = parse_rational(&format!("{eps}"))?;
            let exact = 2.0 * to_f64(&exact_exp_chi(&g, dh, e));
            let threshold = degree_threshold(g.num_vertices(), dhat, eps, &c);
            let chi_max = (0..g.num_vertices())
                .map(|u| g.adj(u).len())
                .filter(|&deg| is_low_degree(deg, threshold))
                .max()
                .unwrap_or(0) as f64;
            let samples: u64 = records.iter().map(|r| r.samples).sum();
            (Some(exact), Some(4.0 * chi_max / (samples.max(1) as f64).sqrt()))
        }
        _ => (None, None),
    };
    let summary = EstimateSummary {
        trials: a.run.trials,
        average_degree: d,
        mean,
        median,
        std_dev: var.sqrt(),
        within_eps: within,
        total_queries: Quantiles::of(records.iter().map(|r| r.total_queries)),
        exact_refine_mean: exact_mean,
        four_sigma,
    };
    let plan = EstimatePlan {
        input: a.input.display().to_string(),
        mode: a.est.mode,
        epsilon: eps,
        delta: (a.est.mode == EstimateMode::Refine).then_some(a.est.delta),
        dhat: a.est.dhat,
        constants: c,
        conforming: c.is_conforming(),
        trials: a.run.trials,
        seed: a.run.seed,
    };
    emit(&a.run, &plan, &summary, &records)?;
    if a.self_check {
        match (exact_mean, four_sigma) {
            (Some(x), Some(w)) if (mean - x).abs() > w => return Ok(Status::Violations(1)),
            (Some(_), Some(_)) => {}
            _ => bail!("--self-check needs --mode refine"),
        }
    }
    Ok(Status::Ok)
}
