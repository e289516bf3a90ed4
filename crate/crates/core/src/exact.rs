//! Brute-force ground truth for small graphs.
//!
//! Everything here is exponential in the number of erased entries or linear
//! in `n` with large constants, and is meant for checking the sublinear
//! algorithms on desk-scale instances.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use itertools::Itertools;
use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::connectedness::{no_erasure_levels, MidAlphaSchedule, SmallAlphaCase, SmallAlphaSchedule};
use crate::graph::{Completion, PartiallyErasedGraph, VertexId, Violation};
use crate::rational::{serde_pq_opt, Rational};

const LN_6: f64 = 1.791_759_469_228_055;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactLimits {
    /// Refuse graphs with more erased entries than this.
    pub max_erased_slots: usize,
    /// Stop enumerating completions after this many.
    pub completion_cap: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_erased_slots: 20,
            completion_cap: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{erased} erased entries exceed the enumeration limit of {limit}")]
    TooManyErasures { erased: usize, limit: usize },
    #[error("the graph has no completion")]
    Uncompletable(Vec<Violation>),
    #[error("distance is undefined for a graph with several vertices and no edges")]
    NoEdges,
}

/// What remains to be decided after the half-erased edges are realized.
struct Residual {
    n: usize,
    /// `(vertex, partner)`: `partner` must occupy an erased slot of `vertex`.
    forced: Vec<(VertexId, VertexId)>,
    /// Erased slots per vertex still open after the forced fills.
    free: Vec<usize>,
    /// Edges present in every completion, `(min, max)`.
    edges: HashSet<(VertexId, VertexId)>,
}

fn check_size(g: &PartiallyErasedGraph, limits: &ExactLimits) -> Result<(), ExactError> {
    let erased = g.erased_count();
    if erased > limits.max_erased_slots {
        return Err(ExactError::TooManyErasures {
            erased,
            limit: limits.max_erased_slots,
        });
    }
    Ok(())
}

fn residual(g: &PartiallyErasedGraph) -> Result<Residual, ExactError> {
    g.validate().map_err(ExactError::Uncompletable)?;
    let n = g.num_vertices();
    let forced: Vec<_> = g.half_erased_edges().into_iter().map(|(from, to)| (to, from)).collect();
    let mut free: Vec<usize> = (0..n).map(|u| g.erased_in(u)).collect();
    for &(u, _) in &forced {
        free[u] -= 1;
    }
    Ok(Residual {
        n,
        forced,
        free,
        edges: g.known_edges().into_iter().collect(),
    })
}

/// Lists every way to join the open erased slots into new edges. The vertex
/// with the smallest id among those with open slots picks its whole partner
/// set at once, so each edge set is produced exactly once.
fn extend(
    r: &mut Residual,
    chosen: &mut Vec<(VertexId, VertexId)>,
    visit: &mut dyn FnMut(&[(VertexId, VertexId)]) -> bool,
) -> bool {
    let Some(u) = r.free.iter().position(|&f| f > 0) else {
        return visit(chosen);
    };
    let need = r.free[u];
    let candidates: Vec<VertexId> = (u + 1..r.n)
        .filter(|&w| r.free[w] > 0 && !r.edges.contains(&(u, w)))
        .collect();
    if candidates.len() < need {
        return true;
    }
    for combo in candidates.into_iter().combinations(need) {
        r.free[u] = 0;
        for &w in &combo {
            r.free[w] -= 1;
            r.edges.insert((u, w));
            chosen.push((u, w));
        }
        let go_on = extend(r, chosen, visit);
        for &w in &combo {
            r.free[w] += 1;
            r.edges.remove(&(u, w));
            chosen.pop();
        }
        r.free[u] = need;
        if !go_on {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompletionSet {
    pub completions: Vec<Completion>,
    /// The completion cap stopped the enumeration early.
    pub partial: bool,
}

/// All completions of `g` up to the placement of partners among a vertex's
/// erased slots (one per distinct edge set). An uncompletable graph yields
/// an empty set.
pub fn enumerate_completions(g: &PartiallyErasedGraph, limits: &ExactLimits) -> Result<CompletionSet, ExactError> {
    check_size(g, limits)?;
    let mut r = match residual(g) {
        Ok(r) => r,
        Err(ExactError::Uncompletable(_)) => return Ok(CompletionSet::default()),
        Err(e) => return Err(e),
    };
    let slots: Vec<Vec<usize>> = (0..r.n)
        .map(|u| {
            g.adj(u)
                .iter()
                .enumerate()
                .filter(|(_, e)| e.is_erased())
                .map(|(i, _)| i + 1)
                .collect()
        })
        .collect();
    let forced = r.forced.clone();
    let mut out = CompletionSet::default();
    let cap = limits.completion_cap;
    extend(&mut r, &mut Vec::new(), &mut |added| {
        if out.completions.len() >= cap {
            out.partial = true;
            return false;
        }
        let mut partners: Vec<Vec<VertexId>> = vec![Vec::new(); slots.len()];
        for &(u, w) in &forced {
            partners[u].push(w);
        }
        for &(u, w) in added {
            partners[u].push(w);
            partners[w].push(u);
        }
        let mut c = Completion::default();
        for (u, list) in partners.iter_mut().enumerate() {
            list.sort_unstable();
            for (&slot, &w) in slots[u].iter().zip(list.iter()) {
                c.assignment.insert((u, slot), w);
            }
        }
        out.completions.push(c);
        true
    });
    Ok(out)
}

fn component_stats(uf: &UnionFind<usize>, free: &[usize]) -> (usize, usize) {
    let mut open: HashMap<usize, usize> = HashMap::new();
    for (v, &f) in free.iter().enumerate() {
        *open.entry(uf.find(v)).or_default() += f;
    }
    let total = open.len();
    let with_slots = open.values().filter(|&&f| f > 0).count();
    (total, with_slots)
}

fn min_components_search(r: &mut Residual, uf: &UnionFind<usize>, best: &mut usize, floor: usize) {
    let (total, open) = component_stats(uf, &r.free);
    let remaining_edges = r.free.iter().sum::<usize>() / 2;
    if remaining_edges == 0 {
        *best = (*best).min(total);
        return;
    }
    let bound = (total - open) + open.saturating_sub(remaining_edges).max(1);
    if bound >= *best {
        return;
    }
    let u = r.free.iter().position(|&f| f > 0).expect("open slot");
    let need = r.free[u];
    let candidates: Vec<VertexId> = (u + 1..r.n)
        .filter(|&w| r.free[w] > 0 && !r.edges.contains(&(u, w)))
        .collect();
    if candidates.len() < need {
        return;
    }
    for combo in candidates.into_iter().combinations(need) {
        let mut next = uf.clone();
        r.free[u] = 0;
        for &w in &combo {
            r.free[w] -= 1;
            r.edges.insert((u, w));
            next.union(u, w);
        }
        min_components_search(r, &next, best, floor);
        for &w in &combo {
            r.free[w] += 1;
            r.edges.remove(&(u, w));
        }
        r.free[u] = need;
        if *best <= floor {
            return;
        }
    }
}

/// Fewest connected components over all completions (branch and bound).
pub fn min_components(g: &PartiallyErasedGraph, limits: &ExactLimits) -> Result<usize, ExactError> {
    check_size(g, limits)?;
    let mut r = residual(g)?;
    let mut uf = UnionFind::new(r.n);
    for &(u, v) in &r.edges {
        uf.union(u, v);
    }
    let (total, open) = component_stats(&uf, &r.free);
    let remaining = r.free.iter().sum::<usize>() / 2;
    let floor = if open == 0 {
        total
    } else {
        (total - open) + open.saturating_sub(remaining).max(1)
    };
    let mut best = usize::MAX;
    min_components_search(&mut r, &uf, &mut best, floor);
    if best == usize::MAX {
        Err(ExactError::Uncompletable(Vec::new()))
    } else {
        Ok(best)
    }
}

/// `(min components − 1) / m`: the fewest edges to add to some completion to
/// connect it, relative to `m`.
pub fn distance_to_connectedness(g: &PartiallyErasedGraph, limits: &ExactLimits) -> Result<Rational, ExactError> {
    let k = min_components(g, limits)?;
    let m = g.num_edges();
    if m == 0 {
        return if g.num_vertices() == 1 {
            Ok(Rational::from_integer(0))
        } else {
            Err(ExactError::NoEdges)
        };
    }
    Ok(Rational::new(k as i128 - 1, m as i128))
}

/// Components of the graph where `u ~ v` whenever either lists the other.
pub fn weak_components(g: &PartiallyErasedGraph) -> Vec<Vec<VertexId>> {
    let n = g.num_vertices();
    let mut uf = UnionFind::new(n);
    for u in 0..n {
        for v in g.adj(u).iter().filter_map(|e| e.vertex()) {
            uf.union(u, v);
        }
    }
    let mut groups: HashMap<usize, Vec<VertexId>> = HashMap::new();
    for v in 0..n {
        groups.entry(uf.find(v)).or_default().push(v);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort_unstable_by_key(|c| c[0]);
    out
}

/// Vertices reachable from `s` along nonerased entries.
pub fn reach(g: &PartiallyErasedGraph, s: VertexId) -> HashSet<VertexId> {
    let mut seen = HashSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for w in g.adj(v).iter().filter_map(|e| e.vertex()) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

pub fn representation_length(g: &PartiallyErasedGraph, set: &[VertexId]) -> usize {
    set.iter().map(|&v| g.adj(v).len()).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralizedWitness {
    pub vertices: Vec<VertexId>,
    pub erasures: usize,
    /// Every valid start vertex for the reachability condition; all vertices
    /// that reach the whole set when it is erasure-free.
    pub anchors: Vec<VertexId>,
    /// Start vertices whose BFS closes on exactly this set, i.e. from which
    /// the mid-alpha tester can detect it.
    pub detectors: Vec<VertexId>,
    pub representation_length: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WitnessInventory {
    pub plain: Vec<Vec<VertexId>>,
    pub generalized: Vec<GeneralizedWitness>,
}

/// Plain and generalized witnesses of a completable graph.
///
/// In a completable graph every witness is a component of the
/// either-direction adjacency relation: a vertex outside a closed set that
/// lists a vertex inside it would need an erased slot the set cannot spare.
/// So the candidates are exactly those components, other than the whole
/// vertex set.
pub fn inventory_witnesses(g: &PartiallyErasedGraph) -> WitnessInventory {
    let n = g.num_vertices();
    let mut inv = WitnessInventory::default();
    for comp in weak_components(g) {
        if comp.len() == n {
            continue;
        }
        let members: HashSet<VertexId> = comp.iter().copied().collect();
        let closed = comp
            .iter()
            .all(|&v| g.adj(v).iter().filter_map(|e| e.vertex()).all(|w| members.contains(&w)));
        if !closed {
            continue;
        }
        let erasures: usize = comp.iter().map(|&v| g.erased_in(v)).sum();
        let covers = |s: VertexId| reach(g, s).len() == comp.len();
        let anchors: Vec<VertexId> = match erasures {
            0 => comp.iter().copied().filter(|&v| covers(v)).collect(),
            1 => {
                let u = *comp.iter().find(|&&v| g.erased_in(v) == 1).expect("erased vertex");
                comp.iter()
                    .copied()
                    .filter(|&v| g.lists(v, u) && !g.lists(u, v) && covers(v))
                    .collect()
            }
            _ => Vec::new(),
        };
        if anchors.is_empty() {
            continue;
        }
        if erasures == 0 {
            inv.plain.push(comp.clone());
        }
        inv.generalized.push(GeneralizedWitness {
            detectors: comp.iter().copied().filter(|&v| covers(v)).collect(),
            representation_length: representation_length(g, &comp),
            vertices: comp,
            erasures,
            anchors,
        });
    }
    inv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetSize {
    Small,
    Big,
}

/// Small/big classification of a vertex set for proximity `eps_star`.
///
/// With `eps_star·davg² ≥ 4` the set is small when it has at most
/// `4/(eps_star·davg)` vertices; otherwise when its representation length
/// is at most `4/eps_star`.
pub fn small_big_classify(g: &PartiallyErasedGraph, set: &[VertexId], eps_star: Rational) -> SetSize {
    let davg = g.average_degree_exact();
    let four = Rational::from_integer(4);
    let small = if eps_star * davg * davg >= four {
        Rational::from_integer(set.len() as i128) * eps_star * davg <= four
    } else {
        Rational::from_integer(representation_length(g, set) as i128) * eps_star <= four
    };
    if small {
        SetSize::Small
    } else {
        SetSize::Big
    }
}

/// Vertices whose degree exceeds `factor·sqrt(n·d_hat/eps)`, decided exactly
/// by comparing squares.
pub fn high_degree_set(g: &PartiallyErasedGraph, d_hat: Rational, eps: Rational, factor: Rational) -> Vec<bool> {
    let n = Rational::from_integer(g.num_vertices() as i128);
    let bound = factor * factor * n * d_hat / eps;
    (0..g.num_vertices())
        .map(|u| {
            let d = Rational::from_integer(g.adj(u).len() as i128);
            d * d > bound
        })
        .collect()
}

/// Expected single-sample credit of the estimator with crude estimate
/// `d_hat`: `(1/n)·Σ_{u low} (d⁺(u) + d⊥(u))`.
pub fn exact_exp_chi(g: &PartiallyErasedGraph, d_hat: Rational, eps: Rational) -> Rational {
    exact_exp_chi_with_factor(g, d_hat, eps, Rational::from_integer(4))
}

pub fn exact_exp_chi_with_factor(g: &PartiallyErasedGraph, d_hat: Rational, eps: Rational, factor: Rational) -> Rational {
    use crate::avg_degree::{d_bot, d_plus};
    let high = high_degree_set(g, d_hat, eps, factor);
    let total: usize = (0..g.num_vertices())
        .filter(|&u| !high[u])
        .map(|u| d_plus(g, u) + d_bot(g, u))
        .sum();
    Rational::new(total as i128, g.num_vertices() as i128)
}

/// Quality when BFS is bounded by vertex count: `1/|C|` on plain witnesses.
pub fn quality_vertex_count(g: &PartiallyErasedGraph, inv: &WitnessInventory) -> Vec<Rational> {
    let mut q = vec![Rational::from_integer(0); g.num_vertices()];
    for c in &inv.plain {
        for &v in c {
            q[v] = Rational::new(1, c.len() as i128);
        }
    }
    q
}

/// Quality when BFS is bounded by edge count: `deg(v)/(2E)` on plain
/// witnesses with `E > 0` edges, 1 on isolated ones, 0 elsewhere.
///
/// A component of a completion that contains no erased entry is a plain
/// witness (or the whole graph), so this agrees with the definition for
/// every completion.
pub fn quality_edge_count(g: &PartiallyErasedGraph, inv: &WitnessInventory) -> Vec<Rational> {
    let mut q = vec![Rational::from_integer(0); g.num_vertices()];
    for c in &inv.plain {
        let twice_edges = representation_length(g, c) as i128;
        for &v in c {
            q[v] = if twice_edges == 0 {
                Rational::from_integer(1)
            } else {
                Rational::new(g.adj(v).len() as i128, twice_edges)
            };
        }
    }
    q
}

fn level_detects(g: &PartiallyErasedGraph, case: SmallAlphaCase, level: u32, v: VertexId, c: &[VertexId]) -> bool {
    match case {
        SmallAlphaCase::VertexCap => c.len() <= 1usize << level,
        SmallAlphaCase::EdgeCap => {
            let edges = representation_length(g, c) as u64 / 2;
            edges <= (1u64 << (level - 1)) * g.adj(v).len() as u64
        }
    }
}

fn rejection_from_levels(g: &PartiallyErasedGraph, inv: &WitnessInventory, case: SmallAlphaCase, reps: &[u64]) -> f64 {
    let n = g.num_vertices() as f64;
    let mut accept = 1.0f64;
    for (k, &r) in reps.iter().enumerate() {
        let level = k as u32 + 1;
        let hits = inv
            .plain
            .iter()
            .map(|c| c.iter().filter(|&&v| level_detects(g, case, level, v, c)).count())
            .sum::<usize>();
        accept *= (1.0 - hits as f64 / n).powf(r as f64);
    }
    1.0 - accept
}

/// Rejection probability of the small-alpha tester without its query cap.
pub fn small_alpha_rejection_probability(g: &PartiallyErasedGraph, inv: &WitnessInventory, schedule: &SmallAlphaSchedule) -> f64 {
    rejection_from_levels(g, inv, schedule.case, &schedule.reps)
}

/// Rejection probability of the no-erasure tester.
pub fn no_erasure_rejection_probability(g: &PartiallyErasedGraph, inv: &WitnessInventory, epsilon: f64, davg: f64) -> f64 {
    let t = no_erasure_levels(epsilon, davg);
    let reps: Vec<u64> = (1..=t).map(|i| (2f64.powi((t - i) as i32) * LN_6).ceil() as u64).collect();
    rejection_from_levels(g, inv, SmallAlphaCase::EdgeCap, &reps)
}

/// Probability that one BFS of the mid-alpha tester detects a witness, and
/// the tester's overall rejection probability.
pub fn mid_alpha_rejection_probability(g: &PartiallyErasedGraph, inv: &WitnessInventory, schedule: &MidAlphaSchedule) -> (f64, f64) {
    let hits: usize = inv
        .generalized
        .iter()
        .filter(|w| w.representation_length as u64 <= schedule.query_cap)
        .map(|w| w.detectors.len())
        .sum();
    let p = hits as f64 / g.num_vertices() as f64;
    (p, 1.0 - (1.0 - p).powf(schedule.reps as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactReport {
    pub n: usize,
    pub m: usize,
    pub erased_entries: usize,
    pub completions_count: usize,
    pub completions_partial: bool,
    pub min_components_over_completions: Option<usize>,
    #[serde(with = "serde_pq_opt")]
    pub distance_to_connectedness: Option<Rational>,
    pub plain_witnesses: Vec<Vec<VertexId>>,
    pub generalized_witnesses: Vec<GeneralizedWitness>,
    #[serde(with = "serde_pq_opt")]
    pub d_hat: Option<Rational>,
    #[serde(with = "serde_pq_opt")]
    pub exp_chi: Option<Rational>,
}

/// Everything above in one report. `chi` supplies `(d_hat, eps)` for the
/// expected credit. An uncompletable graph reports zero completions and no
/// distance.
pub fn exact_report(
    g: &PartiallyErasedGraph,
    limits: &ExactLimits,
    chi: Option<(Rational, Rational)>,
) -> Result<ExactReport, ExactError> {
    let completions = enumerate_completions(g, limits)?;
    let (min_components, distance) = if completions.completions.is_empty() {
        (None, None)
    } else {
        let k = min_components(g, limits)?;
        (Some(k), distance_to_connectedness(g, limits).ok())
    };
    let inv = inventory_witnesses(g);
    Ok(ExactReport {
        n: g.num_vertices(),
        m: g.num_edges(),
        erased_entries: g.erased_count(),
        completions_count: completions.completions.len(),
        completions_partial: completions.partial,
        min_components_over_completions: min_components,
        distance_to_connectedness: distance,
        plain_witnesses: inv.plain,
        generalized_witnesses: inv.generalized,
        d_hat: chi.map(|c| c.0),
        exp_chi: chi.map(|(d_hat, eps)| exact_exp_chi(g, d_hat, eps)),
    })
}

/// Connected components of fully specified lists.
pub fn components_of(lists: &[Vec<VertexId>]) -> Vec<BTreeSet<VertexId>> {
    let mut uf = UnionFind::new(lists.len());
    for (u, l) in lists.iter().enumerate() {
        for &v in l {
            uf.union(u, v);
        }
    }
    let mut groups: HashMap<usize, BTreeSet<VertexId>> = HashMap::new();
    for v in 0..lists.len() {
        groups.entry(uf.find(v)).or_default().insert(v);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort_unstable_by_key(|c| *c.iter().next().expect("nonempty"));
    out
}
