//! Instance families: the lower-bound constructions, BFS gadgets, and random
//! corpora with controlled erasures.
//!
//! Every generator finishes by relabeling vertices with a uniform random
//! permutation and shuffling each list, so that neither labels nor entry
//! positions reveal the construction.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{AdjEntry, GraphError, PartiallyErasedGraph, VertexId};
use crate::rational::{format_rational, Rational};
use crate::rng::{rng_from_seed, TrialRng};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn infeasible<T>(msg: impl Into<String>) -> Result<T, GenError> {
    Err(GenError::Infeasible(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    GPlus,
    GMinus,
    G1,
    G2,
    Fig1Component,
    Fig2Component,
    ForestOfComponents,
    RandomRegularish,
    ConnectedRandom,
    CycleUnion,
}

/// A generated graph plus the labels of its distinguished vertices after
/// relabeling.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: PartiallyErasedGraph,
    pub family: Family,
    pub seed: u64,
    /// The special vertex `v*` of the lower-bound families.
    pub hub: Option<VertexId>,
    /// Gadget vertices for the figure gadgets.
    pub gadget: Vec<VertexId>,
    /// The gadget's unique anchor, when it has one.
    pub anchor: Option<VertexId>,
    /// `permutation[old] = new`.
    pub permutation: Vec<VertexId>,
}

/// Uniformly relabels and shuffles every list.
fn scramble(mut lists: Vec<Vec<AdjEntry>>, rng: &mut TrialRng) -> Result<(PartiallyErasedGraph, Vec<VertexId>), GenError> {
    let mut perm: Vec<VertexId> = (0..lists.len()).collect();
    perm.shuffle(rng);
    for list in &mut lists {
        list.shuffle(rng);
    }
    let g = PartiallyErasedGraph::from_lists(lists)?.relabel(&perm)?;
    Ok((g, perm))
}

fn finish(
    lists: Vec<Vec<AdjEntry>>,
    family: Family,
    seed: u64,
    hub: Option<VertexId>,
    gadget: &[VertexId],
    anchor: Option<VertexId>,
) -> Result<Instance, GenError> {
    let mut rng = rng_from_seed(seed);
    let (graph, perm) = scramble(lists, &mut rng)?;
    Ok(Instance {
        graph,
        family,
        seed,
        hub: hub.map(|h| perm[h]),
        gadget: gadget.iter().map(|&v| perm[v]).collect(),
        anchor: anchor.map(|a| perm[a]),
        permutation: perm,
    })
}

fn cycle_lists(lists: &mut [Vec<AdjEntry>], vertices: &[VertexId]) {
    let t = vertices.len();
    for j in 0..t {
        let v = vertices[j];
        lists[v].push(AdjEntry::Vertex(vertices[(j + t - 1) % t]));
        lists[v].push(AdjEntry::Vertex(vertices[(j + 1) % t]));
    }
}

/// Cycle length `t = (1 − ε)/(2ε)` of the connectedness lower-bound family.
pub fn gplus_cycle_length(eps: Rational) -> Result<usize, GenError> {
    if eps <= Rational::zero() || eps > Rational::new(1, 7) {
        return infeasible(format!("epsilon {} must lie in (0, 1/7]", format_rational(&eps)));
    }
    let t = (Rational::one() - eps) / (eps * 2);
    if !t.is_integer() {
        return infeasible(format!(
            "(1 - eps)/(2 eps) = {} is not an integer",
            format_rational(&t)
        ));
    }
    Ok(t.to_integer() as usize)
}

fn gen_cycles_with_hub(eps: Rational, k: usize, seed: u64, hub_lists_all: bool) -> Result<Instance, GenError> {
    let t = gplus_cycle_length(eps)?;
    if k < 2 || k % 2 == 1 {
        return infeasible(format!("k = {k} must be a positive even number"));
    }
    let n = k * t + 1;
    let hub = k * t;
    let mut lists = vec![Vec::new(); n];
    for c in 0..k {
        let vertices: Vec<_> = (c * t..(c + 1) * t).collect();
        cycle_lists(&mut lists, &vertices);
        lists[c * t].push(AdjEntry::Erased);
        if hub_lists_all {
            lists[hub].push(AdjEntry::Vertex(c * t));
        }
    }
    let family = if hub_lists_all { Family::GPlus } else { Family::GMinus };
    finish(lists, family, seed, Some(hub), &[], None)
}

/// `k` disjoint `t`-cycles, each with one degree-3 vertex whose third entry
/// is erased, and a hub listing all the degree-3 vertices. Has a connected
/// completion.
pub fn gen_gplus(eps: Rational, k: usize, seed: u64) -> Result<Instance, GenError> {
    gen_cycles_with_hub(eps, k, seed, true)
}

/// As [`gen_gplus`] with an isolated hub; `1/(2t + 1)`-far from connected.
pub fn gen_gminus(eps: Rational, k: usize, seed: u64) -> Result<Instance, GenError> {
    gen_cycles_with_hub(eps, k, seed, false)
}

/// `(cycle length, leaf count)` of the average-degree lower-bound family.
pub fn g1_shape(alpha: Rational, n: usize) -> Result<(usize, usize), GenError> {
    if alpha <= Rational::zero() || alpha > Rational::one() {
        return infeasible(format!("alpha {} must lie in (0, 1]", format_rational(&alpha)));
    }
    if n < 2 {
        return infeasible("n must be at least 2");
    }
    let lambda = alpha * 2 / (Rational::one() + alpha);
    let leaves = lambda * Rational::from_integer(n as i128 - 1);
    if !leaves.is_integer() || leaves.to_integer().is_odd() || leaves.to_integer() < 2 {
        return infeasible(format!(
            "lambda (n - 1) = {} must be a positive even integer",
            format_rational(&leaves)
        ));
    }
    let leaves = leaves.to_integer() as usize;
    let cycle = n - 1 - leaves;
    if cycle < 3 {
        return infeasible(format!("cycle length (1 - lambda)(n - 1) = {cycle} is below 3"));
    }
    Ok((cycle, leaves))
}

fn gen_g_pair(alpha: Rational, n: usize, seed: u64, hub_lists_leaves: bool) -> Result<Instance, GenError> {
    let (cycle, leaves) = g1_shape(alpha, n)?;
    let hub = n - 1;
    let mut lists = vec![Vec::new(); n];
    let cyc: Vec<_> = (0..cycle).collect();
    cycle_lists(&mut lists, &cyc);
    for leaf in cycle..cycle + leaves {
        lists[leaf].push(AdjEntry::Erased);
        if hub_lists_leaves {
            lists[hub].push(AdjEntry::Vertex(leaf));
        }
    }
    let family = if hub_lists_leaves { Family::G1 } else { Family::G2 };
    finish(lists, family, seed, Some(hub), &[], None)
}

/// A cycle, `λ(n − 1)` degree-1 vertices with erased entries, and a hub
/// listing all of them; `λ = 2α/(1 + α)`.
pub fn gen_g1(alpha: Rational, n: usize, seed: u64) -> Result<Instance, GenError> {
    gen_g_pair(alpha, n, seed, true)
}

/// As [`gen_g1`] with an isolated hub; average degree smaller by `1 + α`.
pub fn gen_g2(alpha: Rational, n: usize, seed: u64) -> Result<Instance, GenError> {
    gen_g_pair(alpha, n, seed, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    /// Two erasures; no BFS start certifies the component.
    TwoErasure,
    /// One erasure; exactly one start vertex certifies it.
    OneErasureAnchored,
}

/// Size of the connected cycle placed beside a gadget.
pub const GADGET_CYCLE_LEN: usize = 20;

/// A small gadget component next to a 20-cycle.
///
/// - Two-erasure: path `x – u1 – u2 – y` where `u1` and `u2` list each other
///   and hold an erased entry instead of `x` and `y`. Every BFS meets both
///   erasures.
/// - One-erasure: triangle `u, w, x` plus `v1` listing `u`, with `u` holding
///   an erased entry instead of `v1`. Only a BFS from `v1` sees the whole set.
pub fn gen_fig_component(kind: GadgetKind, seed: u64) -> Result<Instance, GenError> {
    use AdjEntry::{Erased, Vertex};
    let (mut lists, anchor, family): (Vec<Vec<AdjEntry>>, _, _) = match kind {
        GadgetKind::TwoErasure => (
            // x = 0, u1 = 1, u2 = 2, y = 3
            vec![
                vec![Vertex(1)],
                vec![Vertex(2), Erased],
                vec![Vertex(1), Erased],
                vec![Vertex(2)],
            ],
            None,
            Family::Fig1Component,
        ),
        GadgetKind::OneErasureAnchored => (
            // v1 = 0, u = 1, w = 2, x = 3
            vec![
                vec![Vertex(1)],
                vec![Vertex(2), Erased, Vertex(3)],
                vec![Vertex(1), Vertex(3)],
                vec![Vertex(1), Vertex(2)],
            ],
            Some(0),
            Family::Fig2Component,
        ),
    };
    let gadget: Vec<VertexId> = (0..lists.len()).collect();
    let base = lists.len();
    lists.resize(base + GADGET_CYCLE_LEN, Vec::new());
    let cyc: Vec<_> = (base..base + GADGET_CYCLE_LEN).collect();
    cycle_lists(&mut lists, &cyc);
    // keep the gadget's list order: positions matter for which entry is erased
    let mut rng = rng_from_seed(seed);
    let mut perm: Vec<VertexId> = (0..lists.len()).collect();
    perm.shuffle(&mut rng);
    let graph = PartiallyErasedGraph::from_lists(lists)?.relabel(&perm)?;
    Ok(Instance {
        graph,
        family,
        seed,
        hub: None,
        gadget: gadget.iter().map(|&v| perm[v]).collect(),
        anchor: anchor.map(|a: VertexId| perm[a]),
        permutation: perm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErasureStrategy {
    /// Uniformly random entries.
    Uniform,
    /// One entry per component that has an edge, smallest components first,
    /// so as few erasure-free components as possible remain.
    ComponentHiding,
    /// Both entries of uniformly random edges; creates no half-erased edges.
    Symmetric,
}

fn require_erasure_free(g: &PartiallyErasedGraph) -> Result<Vec<Vec<VertexId>>, GenError> {
    (0..g.num_vertices())
        .map(|u| {
            g.adj(u)
                .iter()
                .map(|e| e.vertex().ok_or_else(|| GenError::Infeasible("input already has erasures".into())))
                .collect()
        })
        .collect()
}

/// Erases at most `floor(2·alpha·m)` entries of an erasure-free graph.
///
/// The original graph is a completion of the result, so the output always
/// validates.
pub fn erase(g: &PartiallyErasedGraph, alpha: Rational, strategy: ErasureStrategy, seed: u64) -> Result<PartiallyErasedGraph, GenError> {
    if alpha < Rational::zero() || alpha > Rational::one() {
        return infeasible(format!("alpha {} must lie in [0, 1]", format_rational(&alpha)));
    }
    let lists = require_erasure_free(g)?;
    let total = g.total_entries();
    let budget = (alpha * Rational::from_integer(total as i128)).floor().to_integer() as usize;
    let mut rng = rng_from_seed(seed);
    let slots: Vec<(VertexId, usize)> = match strategy {
        ErasureStrategy::Uniform => {
            let all: Vec<(VertexId, usize)> = (0..lists.len()).flat_map(|u| (1..=lists[u].len()).map(move |i| (u, i))).collect();
            all.choose_multiple(&mut rng, budget.min(total)).copied().collect()
        }
        ErasureStrategy::Symmetric => {
            let edges: Vec<(VertexId, VertexId)> = g.known_edges().into_iter().collect();
            edges
                .choose_multiple(&mut rng, budget / 2)
                .flat_map(|&(u, v)| [(u, slot_of(&lists, u, v)), (v, slot_of(&lists, v, u))])
                .collect()
        }
        ErasureStrategy::ComponentHiding => {
            let mut comps: Vec<Vec<VertexId>> = crate::exact::weak_components(g)
                .into_iter()
                .filter(|c| c.iter().any(|&v| !lists[v].is_empty()))
                .collect();
            comps.shuffle(&mut rng);
            comps.sort_by_key(|c| c.iter().map(|&v| lists[v].len()).sum::<usize>());
            comps
                .iter()
                .take(budget)
                .map(|c| {
                    let with_edges: Vec<VertexId> = c.iter().copied().filter(|&v| !lists[v].is_empty()).collect();
                    let u = *with_edges.choose(&mut rng).expect("component has an edge");
                    (u, rng.gen_range(1..=lists[u].len()))
                })
                .collect()
        }
    };
    Ok(crate::graph::erase_slots(&lists, slots)?)
}

fn slot_of(lists: &[Vec<VertexId>], u: VertexId, v: VertexId) -> usize {
    lists[u].iter().position(|&w| w == v).expect("symmetric lists") + 1
}

/// Random tree on `vertices` (uniform attachment to an earlier vertex).
fn random_tree(vertices: &[VertexId], rng: &mut TrialRng, edges: &mut Vec<(VertexId, VertexId)>) {
    for j in 1..vertices.len() {
        let parent = vertices[rng.gen_range(0..j)];
        edges.push((parent, vertices[j]));
    }
}

/// Adds `extra` random edges inside `vertices`, avoiding duplicates.
fn add_random_edges(
    vertices: &[VertexId],
    extra: usize,
    rng: &mut TrialRng,
    edges: &mut Vec<(VertexId, VertexId)>,
) -> Result<(), GenError> {
    let k = vertices.len();
    let mut present: HashSet<(VertexId, VertexId)> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let room = k * (k.saturating_sub(1)) / 2;
    let inside = present.iter().filter(|(u, v)| vertices.binary_search(u).is_ok() && vertices.binary_search(v).is_ok()).count();
    if inside + extra > room {
        return infeasible(format!("cannot place {extra} more edges among {k} vertices"));
    }
    let mut added = 0;
    while added < extra {
        let u = vertices[rng.gen_range(0..k)];
        let v = vertices[rng.gen_range(0..k)];
        if u != v && present.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
            added += 1;
        }
    }
    Ok(())
}

/// Connected random graph on `n` vertices with `m` edges: a random tree plus
/// random extra edges.
pub fn gen_connected_random(n: usize, m: usize, seed: u64) -> Result<Instance, GenError> {
    if n == 0 || m + 1 < n || m > n * (n - 1) / 2 {
        return infeasible(format!("no connected simple graph with n = {n}, m = {m}"));
    }
    let mut rng = rng_from_seed(seed);
    let vertices: Vec<_> = (0..n).collect();
    let mut edges = Vec::with_capacity(m);
    random_tree(&vertices, &mut rng, &mut edges);
    add_random_edges(&vertices, m - (n - 1), &mut rng, &mut edges)?;
    let g = PartiallyErasedGraph::from_edges(n, &edges)?;
    finish(g.to_lists(), Family::ConnectedRandom, seed, None, &[], None)
}

/// Graph with all degrees near `d`: optionally a Hamiltonian cycle, then
/// random edges between vertices still below degree `d`.
pub fn gen_random_regularish(n: usize, d: usize, connected: bool, seed: u64) -> Result<Instance, GenError> {
    if n < 3 || d >= n || (connected && d < 2) {
        return infeasible(format!("need n >= 3, d < n and d >= 2 when connected (n = {n}, d = {d})"));
    }
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    let mut present = HashSet::new();
    let mut deg = vec![0usize; n];
    let mut add = |u: VertexId, v: VertexId, edges: &mut Vec<(VertexId, VertexId)>, deg: &mut Vec<usize>| {
        if u != v && present.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
            deg[u] += 1;
            deg[v] += 1;
        }
    };
    if connected {
        for j in 0..n {
            add(order[j], order[(j + 1) % n], &mut edges, &mut deg);
        }
    }
    let target = n * d / 2;
    let mut attempts = 0;
    while edges.len() < target && attempts < 50 * target + 1000 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if deg[u] < d && deg[v] < d {
            add(u, v, &mut edges, &mut deg);
        }
    }
    let g = PartiallyErasedGraph::from_edges(n, &edges)?;
    finish(g.to_lists(), Family::RandomRegularish, seed, None, &[], None)
}

/// Disjoint cycles of the given lengths (each at least 3).
pub fn gen_cycle_union(sizes: &[usize], seed: u64) -> Result<Instance, GenError> {
    if sizes.is_empty() || sizes.iter().any(|&s| s < 3) {
        return infeasible("every cycle needs at least 3 vertices");
    }
    let n: usize = sizes.iter().sum();
    let mut lists = vec![Vec::new(); n];
    let mut next = 0;
    for &s in sizes {
        let cyc: Vec<_> = (next..next + s).collect();
        cycle_lists(&mut lists, &cyc);
        next += s;
    }
    finish(lists, Family::CycleUnion, seed, None, &[], None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FarForestSpec {
    #[serde(with = "crate::rational::serde_pq")]
    pub eps: Rational,
    #[serde(with = "crate::rational::serde_pq")]
    pub alpha: Rational,
    pub n: usize,
    pub davg_target: f64,
    pub strategy: ErasureStrategy,
    /// Sizes of the small tree components are uniform in this range.
    pub min_component: usize,
    pub max_component: usize,
    pub seed: u64,
}

impl FarForestSpec {
    pub fn new(eps: Rational, alpha: Rational, n: usize, davg_target: f64, strategy: ErasureStrategy, seed: u64) -> Self {
        Self {
            eps,
            alpha,
            n,
            davg_target,
            strategy,
            min_component: 1,
            max_component: 4,
            seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FarForest {
    pub instance: Instance,
    /// Components before erasure.
    pub components: usize,
    /// Lower bound on the components of every completion.
    pub certified_min_components: usize,
}

/// Components every completion must keep: components of the edges present
/// in all completions, minus one per pair of open erased slots.
pub fn certified_component_lower_bound(g: &PartiallyErasedGraph) -> usize {
    let n = g.num_vertices();
    let mut uf = petgraph::unionfind::UnionFind::new(n);
    for (u, v) in g.known_edges() {
        uf.union(u, v);
    }
    let comps = (0..n).filter(|&v| uf.find(v) == v).count();
    let demand = g.half_erased_edges().len();
    let open = g.erased_count().saturating_sub(demand) / 2;
    comps.saturating_sub(open)
}

/// A graph certified `eps`-far from connected: small random trees beside one
/// connected core, with erasures placed by `spec.strategy`.
///
/// The number of small trees is chosen so that every completion keeps at
/// least `eps·m + 1` components even if each pair of open erased slots
/// merges two of them.
pub fn gen_far_forest(spec: &FarForestSpec) -> Result<FarForest, GenError> {
    let FarForestSpec {
        eps,
        alpha,
        n,
        davg_target,
        strategy,
        min_component,
        max_component,
        seed,
    } = *spec;
    if eps <= Rational::zero() || alpha < Rational::zero() || alpha >= eps {
        return infeasible("need 0 <= alpha < eps");
    }
    if min_component == 0 || min_component > max_component {
        return infeasible("component size range is empty");
    }
    if !(davg_target > 0.0) {
        return infeasible("target average degree must be positive");
    }
    let m = (n as f64 * davg_target / 2.0).round() as usize;
    let m_r = Rational::from_integer(m as i128);
    let margin = match strategy {
        ErasureStrategy::ComponentHiding => 0,
        _ => (alpha * m_r).ceil().to_integer() as usize,
    };
    let needed = (eps * m_r).ceil().to_integer() as usize + 1 + margin;

    let mut rng = rng_from_seed(seed);
    let mut sizes = Vec::new();
    let mut used = 0;
    while sizes.len() + 1 < needed {
        let s = rng.gen_range(min_component..=max_component);
        sizes.push(s);
        used += s;
    }
    if used + 2 > n {
        return infeasible(format!(
            "{} small components of size {min_component}..={max_component} do not fit in n = {n} beside a core",
            sizes.len()
        ));
    }
    let small_edges: usize = sizes.iter().map(|s| s - 1).sum();
    let core: Vec<VertexId> = (used..n).collect();
    let core_edges = m.checked_sub(small_edges).filter(|&e| e + 1 >= core.len()).ok_or_else(|| {
        GenError::Infeasible(format!(
            "target m = {m} is too small for a connected core of {} vertices",
            core.len()
        ))
    })?;

    let mut edges = Vec::with_capacity(m);
    let mut next = 0;
    for &s in &sizes {
        let vs: Vec<_> = (next..next + s).collect();
        random_tree(&vs, &mut rng, &mut edges);
        next += s;
    }
    random_tree(&core, &mut rng, &mut edges);
    add_random_edges(&core, core_edges + 1 - core.len(), &mut rng, &mut edges)?;

    let base = PartiallyErasedGraph::from_edges(n, &edges)?;
    let erased = erase(&base, alpha, strategy, rng.gen())?;
    let certified = certified_component_lower_bound(&erased);
    if Rational::from_integer(certified as i128 - 1) < eps * Rational::from_integer(erased.num_edges() as i128) {
        return infeasible(format!("only {certified} components are certified"));
    }
    let instance = finish(erased.to_lists(), Family::ForestOfComponents, seed, None, &[], None)?;
    Ok(FarForest {
        instance,
        components: sizes.len() + 1,
        certified_min_components: certified,
    })
}

/// Manifest written next to a generated PEG file.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub family: Family,
    pub params: serde_json::Value,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub erased_entries: usize,
    pub erasure_fraction: String,
    pub average_degree: String,
    pub hub: Option<VertexId>,
    pub gadget: Vec<VertexId>,
    pub anchor: Option<VertexId>,
    /// Checked properties, e.g. `"validates"` or `"distance=1/7"`.
    pub certified: Vec<String>,
}

impl Manifest {
    pub fn new(instance: &Instance, params: serde_json::Value) -> Self {
        let g = &instance.graph;
        let mut certified = Vec::new();
        if g.validate().is_ok() {
            certified.push("validates".to_string());
        }
        Self {
            family: instance.family,
            params,
            seed: instance.seed,
            n: g.num_vertices(),
            m: g.num_edges(),
            erased_entries: g.erased_count(),
            erasure_fraction: format_rational(&g.erasure_fraction()),
            average_degree: format_rational(&g.average_degree_exact()),
            hub: instance.hub,
            gadget: instance.gadget.clone(),
            anchor: instance.anchor,
            certified,
        }
    }
}

/// Rounds a rational to `f64` for parameters passed on to the testers.
pub fn approx(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{distance_to_connectedness, inventory_witnesses, ExactLimits};

    #[test]
    fn gminus_at_t3_k4() {
        let inst = gen_gminus(Rational::new(1, 7), 4, 7).unwrap();
        let g = &inst.graph;
        assert_eq!(g.num_vertices(), 13);
        assert_eq!(g.num_edges(), 14);
        assert_eq!(g.degree(inst.hub.unwrap()).unwrap(), 0);
        assert_eq!(g.erasure_fraction(), Rational::new(1, 7));
        assert!(g.validate().is_ok());
        assert_eq!(distance_to_connectedness(g, &ExactLimits::default()).unwrap(), Rational::new(1, 7));
    }

    #[test]
    fn gplus_at_t3_k4() {
        let inst = gen_gplus(Rational::new(1, 7), 4, 7).unwrap();
        let g = &inst.graph;
        assert_eq!(g.degree(inst.hub.unwrap()).unwrap(), 4);
        assert_eq!(g.erasure_fraction(), Rational::new(1, 8));
        assert_eq!(distance_to_connectedness(g, &ExactLimits::default()).unwrap(), Rational::from_integer(0));
    }

    #[test]
    fn infeasible_lower_bound_parameters() {
        assert!(gen_gplus(Rational::new(1, 8), 4, 0).is_err());
        assert!(gen_gplus(Rational::new(1, 7), 3, 0).is_err());
        assert!(gen_gplus(Rational::new(1, 5), 4, 0).is_err());
        assert!(gen_g1(Rational::new(1, 3), 12, 0).is_err());
    }

    #[test]
    fn g1_g2_degree_ratio() {
        let a = Rational::new(1, 3);
        let g1 = gen_g1(a, 13, 1).unwrap().graph;
        let g2 = gen_g2(a, 13, 1).unwrap().graph;
        assert_eq!(g1.average_degree_exact(), Rational::new(24, 13));
        assert_eq!(g2.average_degree_exact(), Rational::new(18, 13));
        assert_eq!(g2.erasure_fraction(), a);
        assert!(g1.validate().is_ok() && g2.validate().is_ok());
    }

    #[test]
    fn gadgets_have_their_caption_properties() {
        let fig1 = gen_fig_component(GadgetKind::TwoErasure, 3).unwrap();
        let inv = inventory_witnesses(&fig1.graph);
        let mut gadget = fig1.gadget.clone();
        gadget.sort_unstable();
        assert!(inv.generalized.iter().all(|w| w.vertices != gadget));
        assert!(inv.plain.iter().all(|c| c != &gadget));
        assert_eq!(inv.plain.len(), 1, "only the cycle");

        let fig2 = gen_fig_component(GadgetKind::OneErasureAnchored, 3).unwrap();
        let inv = inventory_witnesses(&fig2.graph);
        let mut gadget = fig2.gadget.clone();
        gadget.sort_unstable();
        let w = inv.generalized.iter().find(|w| w.vertices == gadget).unwrap();
        assert_eq!(w.anchors, vec![fig2.anchor.unwrap()]);
        assert_eq!(w.detectors, w.anchors);
        assert!(fig2.graph.validate().is_ok());
    }

    #[test]
    fn erase_strategies() {
        let base = gen_connected_random(30, 40, 2).unwrap().graph;
        assert_eq!(erase(&base, Rational::zero(), ErasureStrategy::Uniform, 1).unwrap(), base);
        let all = erase(&base, Rational::one(), ErasureStrategy::Uniform, 1).unwrap();
        assert_eq!(all.erased_count(), all.total_entries());
        let sym = erase(&base, Rational::new(1, 4), ErasureStrategy::Symmetric, 1).unwrap();
        assert!(sym.half_erased_edges().is_empty());
        assert_eq!(sym.erased_count(), 20);
        assert!(sym.validate().is_ok());
        assert!(erase(&all, Rational::zero(), ErasureStrategy::Uniform, 1).is_err());
    }

    #[test]
    fn far_forest_is_certified() {
        let spec = FarForestSpec::new(Rational::new(1, 5), Rational::new(1, 20), 300, 2.0, ErasureStrategy::Uniform, 4);
        let f = gen_far_forest(&spec).unwrap();
        let g = &f.instance.graph;
        assert!(g.validate().is_ok());
        assert!(g.erasure_fraction() <= Rational::new(1, 20));
        assert!(f.certified_min_components as f64 >= 0.2 * g.num_edges() as f64 + 1.0);
    }

    #[test]
    fn hiding_leaves_no_plain_witness() {
        let spec = FarForestSpec {
            min_component: 2,
            ..FarForestSpec::new(Rational::new(1, 5), Rational::new(3, 20), 200, 2.0, ErasureStrategy::ComponentHiding, 9)
        };
        let f = gen_far_forest(&spec).unwrap();
        let inv = inventory_witnesses(&f.instance.graph);
        assert!(inv.plain.is_empty());
        assert!(!inv.generalized.is_empty());
    }

    #[test]
    fn relabeling_preserves_structure() {
        let a = gen_cycle_union(&[3, 4, 5], 1).unwrap().graph;
        let b = gen_cycle_union(&[3, 4, 5], 2).unwrap().graph;
        let mut da: Vec<usize> = (0..12).map(|u| a.degree(u).unwrap()).collect();
        let mut db: Vec<usize> = (0..12).map(|u| b.degree(u).unwrap()).collect();
        da.sort_unstable();
        db.sort_unstable();
        assert_eq!(da, db);
        let mut ca: Vec<usize> = crate::exact::weak_components(&a).iter().map(Vec::len).collect();
        let mut cb: Vec<usize> = crate::exact::weak_components(&b).iter().map(Vec::len).collect();
        ca.sort_unstable();
        cb.sort_unstable();
        assert_eq!(ca, cb);
    }
}
