use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use peg_core::connectedness::{ConnTesterConfig, Verdict};
use peg_core::instance_gen::{erase, gen_connected_random, gen_far_forest, gen_random_regularish, FarForestSpec};
use peg_core::rational::parse_rational;
use peg_core::rng::split_seed;
use peg_core::{PartiallyErasedGraph, Rational};
use serde::Serialize;

use crate::gen::StrategyArg;
use crate::output::{emit, read_graph, thread_pool, Quantiles};
use crate::trials::{conn_trials, estimate_trials, AlgoArg, EstimateMode, EstimatorFlags};
use crate::{RunFlags, Status};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    Eps,
    Alpha,
    N,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchAlgo {
    SmallAlpha,
    MidAlpha,
    NoErasure,
    UnknownDavg,
    /// The average-degree estimator (doubling search).
    Estimate,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchFamily {
    ConnectedRandom,
    FarForest,
    Regularish,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub sweep: SweepParam,
    /// Values of the swept parameter, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<String>,
    #[arg(long, value_enum)]
    pub algo: BenchAlgo,
    /// Fixed input graph (eps and alpha sweeps only).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Generated instance family when no `--in` is given.
    #[arg(long, value_enum, default_value_t = BenchFamily::ConnectedRandom)]
    pub family: BenchFamily,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub davg: f64,
    /// Distance of generated far forests (defaults to `--eps`).
    #[arg(long)]
    pub gen_eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Uniform)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long)]
    pub sample_factor: Option<f64>,
    #[arg(long)]
    pub threshold_factor: Option<f64>,
    #[arg(long)]
    pub repetition_factor: Option<f64>,
    #[command(flatten)]
    pub run: RunFlags,
}

/// Column order: sweep, value, trial, seed, n, m, verdict, estimate,
/// degree_queries, neighbor_queries, total_queries, wall_us.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub sweep: SweepParam,
    pub value: f64,
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub verdict: Option<Verdict>,
    pub estimate: Option<f64>,
    pub degree_queries: u64,
    pub neighbor_queries: u64,
    pub total_queries: u64,
    pub wall_us: Option<u64>,
}

#[derive(Serialize, Debug)]
struct PointSummary {
    value: f64,
    n: usize,
    m: usize,
    rejection_frequency: Option<f64>,
    mean_estimate: Option<f64>,
    total_queries: Quantiles,
}

#[derive(Serialize, Debug)]
struct BenchPlan<'a> {
    sweep: SweepParam,
    values: &'a [f64],
    algorithm: BenchAlgo,
    input: Option<String>,
    family: Option<BenchFamily>,
    n: usize,
    davg: f64,
    epsilon: f64,
    alpha: f64,
    trials: u64,
    seed: u64,
}

fn rational(x: f64) -> Result<Rational> {
    Ok(parse_rational(&format!("{x}"))?)
}

fn instance(a: &BenchArgs, base: Option<&PartiallyErasedGraph>, eps: f64, alpha: f64, n: usize, seed: u64) -> Result<PartiallyErasedGraph> {
    let erase_if = |g: PartiallyErasedGraph| -> Result<PartiallyErasedGraph> {
        if alpha > 0.0 {
            Ok(erase(&g, rational(alpha)?, a.strategy.into(), split_seed(seed, 1))?)
        } else {
            Ok(g)
        }
    };
    if let Some(g) = base {
        return if a.sweep == SweepParam::Alpha { erase_if(g.clone()) } else { Ok(g.clone()) };
    }
    match a.family {
        BenchFamily::ConnectedRandom => {
            let m = ((n as f64 * a.davg / 2.0).round() as usize).max(n.saturating_sub(1));
            erase_if(gen_connected_random(n, m, seed)?.graph)
        }
        BenchFamily::Regularish => erase_if(gen_random_regularish(n, a.davg.round() as usize, true, seed)?.graph),
        BenchFamily::FarForest => {
            let spec = FarForestSpec::new(
                rational(a.gen_eps.unwrap_or(eps))?,
                rational(alpha)?,
                n,
                a.davg,
                a.strategy.into(),
                seed,
            );
            Ok(gen_far_forest(&spec)?.instance.graph)
        }
    }
}

pub fn run_bench(a: &BenchArgs) -> Result<Status> {
    let values: Vec<f64> = a
        .values
        .iter()
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad sweep value {v:?}")))
        .collect::<Result<_>>()?;
    if a.sweep == SweepParam::N && a.input.is_some() {
        bail!("an n sweep generates its instances; drop --in");
    }
    let base = a.input.as_deref().map(read_graph).transpose()?;
    if a.sweep == SweepParam::Alpha {
        if let Some(g) = &base {
            if g.erased_count() > 0 {
                bail!("an alpha sweep over --in needs an erasure-free graph");
            }
        }
    }
    let pool = thread_pool(a.run.threads)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (j, &value) in values.iter().enumerate() {
        let (eps, alpha, n) = match a.sweep {
            SweepParam::Eps => (value, a.alpha, a.n),
            SweepParam::Alpha => (a.eps, value, a.n),
            SweepParam::N => (a.eps, a.alpha, value as usize),
        };
        let point_seed = split_seed(a.run.seed, j as u64);
        let g = instance(a, base.as_ref(), eps, alpha, n, split_seed(point_seed, u64::MAX))?;
        let (gn, gm) = (g.num_vertices(), g.num_edges());
        let row = |trial, seed, verdict, estimate, d, nb, total, wall_us| BenchRow {
            sweep: a.sweep,
            value,
            trial,
            seed,
            n: gn,
            m: gm,
            verdict,
            estimate,
            degree_queries: d,
            neighbor_queries: nb,
            total_queries: total,
            wall_us,
        };
        let point_rows: Vec<BenchRow> = match a.algo {
            BenchAlgo::Estimate => {
                let est = EstimatorFlags {
                    eps,
                    mode: EstimateMode::Driver,
                    dhat: None,
                    delta: 0.25,
                    sample_factor: a.sample_factor,
                    threshold_factor: a.threshold_factor,
                    repetition_factor: a.repetition_factor,
                };
                let c = est.constants();
                pool.install(|| estimate_trials(&g, &est, c, point_seed, a.run.trials, a.run.timing))?
                    .into_iter()
                    .map(|r| row(r.trial, r.seed, None, Some(r.estimate), r.degree_queries, r.neighbor_queries, r.total_queries, r.wall_us))
                    .collect()
            }
            algo => {
                let algo = match algo {
                    BenchAlgo::SmallAlpha => AlgoArg::SmallAlpha,
                    BenchAlgo::MidAlpha => AlgoArg::MidAlpha,
                    BenchAlgo::NoErasure => AlgoArg::NoErasure,
                    _ => AlgoArg::UnknownDavg,
                };
                let cfg = ConnTesterConfig::new(eps, alpha, Some(g.average_degree()), point_seed);
                pool.install(|| conn_trials(&g, algo.into(), &cfg, a.run.trials, a.run.timing))?
                    .into_iter()
                    .map(|(r, _)| row(r.trial, r.seed, Some(r.verdict), None, r.degree_queries, r.neighbor_queries, r.total_queries, r.wall_us))
                    .collect()
            }
        };
        let k = point_rows.len().max(1) as f64;
        let rejections = point_rows.iter().filter(|r| r.verdict == Some(Verdict::Reject)).count() as f64;
        points.push(PointSummary {
            value,
            n: gn,
            m: gm,
            rejection_frequency: (a.algo != BenchAlgo::Estimate).then_some(rejections / k),
            mean_estimate: (a.algo == BenchAlgo::Estimate)
                .then(|| point_rows.iter().filter_map(|r| r.estimate).sum::<f64>() / k),
            total_queries: Quantiles::of(point_rows.iter().map(|r| r.total_queries)),
        });
        rows.extend(point_rows);
    }
    let plan = BenchPlan {
        sweep: a.sweep,
        values: &values,
        algorithm: a.algo,
        input: a.input.as_ref().map(|p| p.display().to_string()),
        family: a.input.is_none().then_some(a.family),
        n: a.n,
        davg: a.davg,
        epsilon: a.eps,
        alpha: a.alpha,
        trials: a.run.trials,
        seed: a.run.seed,
    };
    emit(&a.run, &plan, &points, &rows)?;
    Ok(Status::Ok)
}
