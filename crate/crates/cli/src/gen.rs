use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use peg_core::exact::{distance_to_connectedness, ExactLimits};
use peg_core::instance_gen::{
    erase, gen_connected_random, gen_cycle_union, gen_far_forest, gen_fig_component, gen_g1, gen_g2, gen_gminus,
    gen_gplus, gen_random_regularish, ErasureStrategy, FarForestSpec, GadgetKind, Instance, Manifest,
};
use peg_core::peg::write_peg;
use peg_core::rational::format_rational;
use peg_core::Rational;
use serde_json::json;

use crate::output::{read_graph, to_json, write_text};
use crate::{rational_arg, Status};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    /// Cycles with one erased entry each and a hub listing them (connected completion).
    Gplus,
    /// As gplus with an isolated hub (far from connected).
    Gminus,
    /// Cycle plus erased leaves listed by a hub.
    G1,
    /// As g1 with an isolated hub.
    G2,
    /// Two-erasure gadget beside a 20-cycle.
    Fig1,
    /// One-erasure anchored gadget beside a 20-cycle.
    Fig2,
    /// Certified far forest: small trees beside a connected core.
    FarForest,
    /// Near-regular random graph.
    Regularish,
    /// Random tree plus random edges.
    ConnectedRandom,
    /// Disjoint cycles.
    CycleUnion,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    Uniform,
    ComponentHiding,
    Symmetric,
}

impl From<StrategyArg> for ErasureStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Uniform => ErasureStrategy::Uniform,
            StrategyArg::ComponentHiding => ErasureStrategy::ComponentHiding,
            StrategyArg::Symmetric => ErasureStrategy::Symmetric,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_parser = rational_arg)]
    pub eps: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
    /// Number of cycles (gplus, gminus).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Target degree (regularish).
    #[arg(long)]
    pub d: Option<usize>,
    /// Target average degree (far-forest).
    #[arg(long)]
    pub davg: Option<f64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Uniform)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 1)]
    pub min_component: usize,
    #[arg(long, default_value_t = 4)]
    pub max_component: usize,
    /// Add a Hamiltonian cycle first (regularish).
    #[arg(long)]
    pub connected: bool,
    /// Cycle lengths, comma separated (cycle-union).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// PEG output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json` when `--out` is given.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: FamilyArg) -> Result<T> {
    match v {
        Some(v) => Ok(v),
        None => bail!("--{flag} is required for family {family:?}"),
    }
}

pub fn build(a: &GenArgs) -> Result<(Instance, serde_json::Value, Vec<String>)> {
    let f = a.family;
    let mut certified = Vec::new();
    let fmt = |r: Rational| format_rational(&r);
    let (inst, params) = match f {
        FamilyArg::Gplus | FamilyArg::Gminus => {
            let (eps, k) = (need(a.eps, "eps", f)?, need(a.k, "k", f)?);
            let inst = if f == FamilyArg::Gplus { gen_gplus(eps, k, a.seed)? } else { gen_gminus(eps, k, a.seed)? };
            (inst, json!({"eps": fmt(eps), "k": k}))
        }
        FamilyArg::G1 | FamilyArg::G2 => {
            let (alpha, n) = (need(a.alpha, "alpha", f)?, need(a.n, "n", f)?);
            let inst = if f == FamilyArg::G1 { gen_g1(alpha, n, a.seed)? } else { gen_g2(alpha, n, a.seed)? };
            (inst, json!({"alpha": fmt(alpha), "n": n}))
        }
        FamilyArg::Fig1 => (gen_fig_component(GadgetKind::TwoErasure, a.seed)?, json!({})),
        FamilyArg::Fig2 => (gen_fig_component(GadgetKind::OneErasureAnchored, a.seed)?, json!({})),
        FamilyArg::FarForest => {
            let spec = FarForestSpec {
                min_component: a.min_component,
                max_component: a.max_component,
                ..FarForestSpec::new(
                    need(a.eps, "eps", f)?,
                    a.alpha.unwrap_or_default(),
                    need(a.n, "n", f)?,
                    need(a.davg, "davg", f)?,
                    a.strategy.into(),
                    a.seed,
                )
            };
            let far = gen_far_forest(&spec)?;
            certified.push(format!("min-components>={}", far.certified_min_components));
            (far.instance, serde_json::to_value(spec)?)
        }
        FamilyArg::Regularish => {
            let (n, d) = (need(a.n, "n", f)?, need(a.d, "d", f)?);
            (gen_random_regularish(n, d, a.connected, a.seed)?, json!({"n": n, "d": d, "connected": a.connected}))
        }
        FamilyArg::ConnectedRandom => {
            let (n, m) = (need(a.n, "n", f)?, need(a.m, "m", f)?);
            (gen_connected_random(n, m, a.seed)?, json!({"n": n, "m": m}))
        }
        FamilyArg::CycleUnion => {
            if a.sizes.is_empty() {
                bail!("--sizes is required for family cycle-union");
            }
            (gen_cycle_union(&a.sizes, a.seed)?, json!({"sizes": a.sizes}))
        }
    };
    let limits = ExactLimits::default();
    if inst.graph.erased_count() <= limits.max_erased_slots && inst.graph.num_vertices() <= 64 {
        if let Ok(d) = distance_to_connectedness(&inst.graph, &limits) {
            certified.push(format!("distance={}", format_rational(&d)));
        }
    }
    Ok((inst, params, certified))
}

pub fn run_gen(a: &GenArgs) -> Result<Status> {
    let (inst, params, extra) = build(a)?;
    let mut manifest = Manifest::new(&inst, params);
    manifest.certified.extend(extra);
    write_text(a.out.as_deref(), &write_peg(&inst.graph))?;
    let manifest_path = a.manifest.clone().or_else(|| {
        a.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    if let Some(p) = manifest_path {
        write_text(Some(&p), &to_json(&manifest)?)?;
    }
    Ok(Status::Ok)
}

#[derive(Args, Debug)]
pub struct EraseArgs {
    /// Erasure-free PEG input.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Rational,
    #[arg(long, value_enum, default_value_t = StrategyArg::Uniform)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_erase(a: &EraseArgs) -> Result<Status> {
    let g = read_graph(&a.input)?;
    let erased = erase(&g, a.alpha, a.strategy.into(), a.seed)?;
    eprintln!(
        "erased {} of {} entries (fraction {})",
        erased.erased_count(),
        erased.total_entries(),
        format_rational(&erased.erasure_fraction())
    );
    write_text(a.out.as_deref(), &write_peg(&erased))?;
    Ok(Status::Ok)
}
