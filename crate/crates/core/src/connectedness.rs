//! Connectedness testers with one-sided error.
//!
//! All four testers sample vertices, run a bounded BFS through a
//! [`QuerySession`], and reject only after exhibiting a vertex set that is a
//! connected component in every completion. A graph with a connected
//! completion is therefore never rejected.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{AdjEntry, PartiallyErasedGraph, VertexId};
use crate::oracle::{Budget, BudgetScope, OracleError, QueryCounts, QuerySession};

const LN_3: f64 = 1.098_612_288_668_109_8;
const LN_6: f64 = 1.791_759_469_228_055;

/// When a bounded BFS stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopRule {
    /// Stop once `k` distinct vertices have been discovered.
    VertexCap(usize),
    /// Stop once `k` distinct edges have been encountered.
    EdgeCap(u64),
    /// Allow at most `k` neighbor queries.
    QueryCap(u64),
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BfsOutcome {
    pub start: VertexId,
    /// Discovered vertices in BFS order.
    pub explored: Vec<VertexId>,
    /// Lists that were read to the end.
    #[serde(skip)]
    pub lists: HashMap<VertexId, Vec<AdjEntry>>,
    pub entries_scanned: u64,
    pub erasures_seen: usize,
    /// Distinct edges `{v, w}` seen through a nonerased entry.
    pub edges_encountered: u64,
    /// Every discovered vertex had its list read completely.
    pub closed: bool,
    /// The stop rule or the session budget ended the search.
    pub truncated: bool,
    pub halted_on_erasure: bool,
    pub budget_exhausted: bool,
    pub graph_order: usize,
}

impl BfsOutcome {
    /// Whether the explored set is closed and misses at least one vertex.
    fn closed_proper(&self) -> bool {
        self.closed && self.explored.len() < self.graph_order
    }
}

/// BFS over nonerased entries from `start`, halting at the first erased entry
/// when `halt_on_erasure` is set.
pub fn bfs_until(
    s: &mut QuerySession<'_>,
    start: VertexId,
    stop: StopRule,
    halt_on_erasure: bool,
) -> Result<BfsOutcome, OracleError> {
    bfs_with_erasure_limit(s, start, stop, halt_on_erasure.then_some(0))
}

/// BFS that tolerates `max_erasures` erased entries (unlimited for `None`)
/// and halts when it meets one more.
///
/// Only input errors are returned; budget exhaustion ends the search with
/// `truncated` and `budget_exhausted` set.
pub fn bfs_with_erasure_limit(
    s: &mut QuerySession<'_>,
    start: VertexId,
    stop: StopRule,
    max_erasures: Option<usize>,
) -> Result<BfsOutcome, OracleError> {
    let n = s.num_vertices();
    let mut out = BfsOutcome {
        start,
        explored: vec![start],
        lists: HashMap::new(),
        entries_scanned: 0,
        erasures_seen: 0,
        edges_encountered: 0,
        closed: false,
        truncated: false,
        halted_on_erasure: false,
        budget_exhausted: false,
        graph_order: n,
    };
    s.graph().degree(start)?;

    if let StopRule::VertexCap(k) = stop {
        if k <= 1 {
            out.truncated = true;
            return Ok(out);
        }
    }

    let neighbor_base = s.counts().neighbor;
    let mut discovered: HashSet<VertexId> = HashSet::from([start]);
    let mut edges: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut queue = VecDeque::from([start]);

    macro_rules! query {
        ($e:expr) => {
            match $e {
                Ok(value) => value,
                Err(OracleError::BudgetExhausted(_)) => {
                    out.truncated = true;
                    out.budget_exhausted = true;
                    return Ok(out);
                }
                Err(other) => return Err(other),
            }
        };
    }

    while let Some(v) = queue.pop_front() {
        let d = query!(s.degree_cached(v));
        let mut list = Vec::with_capacity(d);
        for i in 1..=d {
            if let StopRule::QueryCap(k) = stop {
                if s.counts().neighbor - neighbor_base >= k {
                    out.truncated = true;
                    return Ok(out);
                }
            }
            let entry = query!(s.q_neighbor(v, i));
            out.entries_scanned += 1;
            list.push(entry);
            match entry {
                AdjEntry::Erased => {
                    out.erasures_seen += 1;
                    if max_erasures.is_some_and(|limit| out.erasures_seen > limit) {
                        out.halted_on_erasure = true;
                        return Ok(out);
                    }
                }
                AdjEntry::Vertex(w) => {
                    if edges.insert((v.min(w), v.max(w))) {
                        out.edges_encountered += 1;
                        if let StopRule::EdgeCap(k) = stop {
                            if out.edges_encountered >= k {
                                out.truncated = true;
                                return Ok(out);
                            }
                        }
                    }
                    if discovered.insert(w) {
                        out.explored.push(w);
                        queue.push_back(w);
                        if let StopRule::VertexCap(k) = stop {
                            if out.explored.len() >= k {
                                out.truncated = true;
                                return Ok(out);
                            }
                        }
                    }
                }
            }
        }
        out.lists.insert(v, list);
    }
    out.closed = true;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Plain,
    Generalized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    /// Sorted vertex ids.
    pub vertices: Vec<VertexId>,
    /// Vertex from which BFS reaches the whole set; set only when the set
    /// holds an erased entry.
    pub anchor: Option<VertexId>,
}

fn sorted(v: &[VertexId]) -> Vec<VertexId> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// An erasure-free closed BFS ball other than the whole graph.
pub fn detect_plain_witness(outcome: &BfsOutcome) -> Option<WitnessReport> {
    (outcome.closed_proper() && outcome.erasures_seen == 0).then(|| WitnessReport {
        kind: WitnessKind::Plain,
        vertices: sorted(&outcome.explored),
        anchor: None,
    })
}

/// A closed set with at most one erased entry whose erasure is the missing
/// half of an internal half-erased edge `v → u`, with every vertex reachable
/// from `v`.
///
/// Works only on lists the BFS already fetched, so it charges no queries.
pub fn detect_generalized_witness(outcome: &BfsOutcome) -> Option<WitnessReport> {
    if !outcome.closed_proper() || outcome.erasures_seen > 1 {
        return None;
    }
    let vertices = sorted(&outcome.explored);
    if outcome.erasures_seen == 0 {
        return Some(WitnessReport {
            kind: WitnessKind::Generalized,
            vertices,
            anchor: None,
        });
    }
    let lists = &outcome.lists;
    let (&u, u_list) = lists.iter().find(|(_, l)| l.contains(&AdjEntry::Erased))?;
    let anchor = outcome.explored.iter().copied().find(|&v| {
        lists[&v].contains(&AdjEntry::Vertex(u))
            && !u_list.contains(&AdjEntry::Vertex(v))
            && reaches_all(lists, v, outcome.explored.len())
    })?;
    Some(WitnessReport {
        kind: WitnessKind::Generalized,
        vertices,
        anchor: Some(anchor),
    })
}

fn reaches_all(lists: &HashMap<VertexId, Vec<AdjEntry>>, from: VertexId, size: usize) -> bool {
    let mut seen = HashSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for w in lists[&v].iter().filter_map(|e| e.vertex()) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() == size
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TesterError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConnTesterConfig {
    pub epsilon: f64,
    pub alpha: f64,
    /// The promised average degree; the unknown-degree tester ignores it.
    pub davg: Option<f64>,
    pub seed: u64,
    /// Abort and accept at six times the expected cost of the small-alpha
    /// tester. Disable to study the bare schedule.
    pub enforce_cap: bool,
}

impl ConnTesterConfig {
    pub fn new(epsilon: f64, alpha: f64, davg: Option<f64>, seed: u64) -> Self {
        Self {
            epsilon,
            alpha,
            davg,
            seed,
            enforce_cap: true,
        }
    }

    fn check_common(&self) -> Result<f64, TesterError> {
        let davg = self
            .davg
            .ok_or_else(|| TesterError::Parameter("average degree required".into()))?;
        if !(davg > 0.0 && davg.is_finite()) {
            return Err(TesterError::Parameter(format!("average degree {davg} must be positive")));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 2.0 / davg) {
            return Err(TesterError::Parameter(format!(
                "epsilon {} must lie in (0, 2/davg) = (0, {})",
                self.epsilon,
                2.0 / davg
            )));
        }
        if !(self.alpha >= 0.0) {
            return Err(TesterError::Parameter(format!("alpha {} must be nonnegative", self.alpha)));
        }
        Ok(davg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    SmallAlpha,
    MidAlpha,
    NoErasure,
    UnknownDavg,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TesterParams {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub alpha: f64,
    pub davg: Option<f64>,
    /// Average witness-size bound driving the schedule.
    pub b: Option<f64>,
    /// `"vertex-cap"` or `"edge-cap"` for the small-alpha tester.
    pub bfs_case: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TesterVerdict {
    pub verdict: Verdict,
    pub witness: Option<WitnessReport>,
    pub queries: QueryCounts,
    /// Query cap in force (total queries for small-alpha, neighbor queries
    /// for unknown-davg).
    pub cap: Option<u64>,
    pub aborted: bool,
    pub seed: u64,
    pub params: TesterParams,
}

impl TesterVerdict {
    pub fn rejected(&self) -> bool {
        self.verdict == Verdict::Reject
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallAlphaCase {
    /// BFS until `2^i + 1` vertices.
    VertexCap,
    /// Degree query, then BFS until `2^(i-1)·deg(v) + 1` edges.
    EdgeCap,
}

/// Loop bounds of the small-alpha tester.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmallAlphaSchedule {
    pub b: f64,
    pub davg: f64,
    pub case: SmallAlphaCase,
    /// `reps[i - 1]` samples at level `i`, for `i = 1..=ceil(log2(4b))`.
    pub reps: Vec<u64>,
    pub expected_cost: f64,
    /// `floor(6 × expected_cost)` charged queries.
    pub cap: u64,
}

impl SmallAlphaSchedule {
    pub fn new(epsilon: f64, alpha: f64, davg: f64) -> Self {
        let b = 2.0 / ((epsilon - 2.0 * alpha) * davg);
        let levels = (4.0 * b).log2().ceil().max(1.0) as u32;
        let case = if b <= davg * b.log2() {
            SmallAlphaCase::VertexCap
        } else {
            SmallAlphaCase::EdgeCap
        };
        let reps: Vec<u64> = (1..=levels)
            .map(|i| (4.0 * b * LN_6 / 2f64.powi(i as i32)).ceil() as u64)
            .collect();
        let expected_cost = reps
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                let scale = 2f64.powi(k as i32 + 1);
                r as f64
                    * match case {
                        SmallAlphaCase::VertexCap => scale * scale,
                        SmallAlphaCase::EdgeCap => scale * davg,
                    }
            })
            .sum::<f64>();
        Self {
            b,
            davg,
            case,
            reps,
            expected_cost,
            cap: (6.0 * expected_cost).floor() as u64,
        }
    }

    /// Stop rule at level `i` for a start vertex of degree `deg`.
    pub fn stop_rule(&self, level: u32, deg: usize) -> StopRule {
        match self.case {
            SmallAlphaCase::VertexCap => StopRule::VertexCap((1usize << level) + 1),
            SmallAlphaCase::EdgeCap => StopRule::EdgeCap((1u64 << (level - 1)) * deg as u64 + 1),
        }
    }
}

fn finish(
    s: &QuerySession<'_>,
    witness: Option<WitnessReport>,
    cap: Option<u64>,
    aborted: bool,
    params: TesterParams,
) -> TesterVerdict {
    TesterVerdict {
        verdict: if witness.is_some() {
            Verdict::Reject
        } else {
            Verdict::Accept
        },
        witness,
        queries: s.counts(),
        cap,
        aborted,
        seed: s.seed(),
        params,
    }
}

/// Tester for `alpha < epsilon/2` with known average degree, wrapped with
/// the abort-and-accept cap at six times its expected cost.
pub fn tester_small_alpha(g: &PartiallyErasedGraph, cfg: &ConnTesterConfig) -> Result<TesterVerdict, TesterError> {
    let davg = cfg.check_common()?;
    if cfg.alpha >= cfg.epsilon / 2.0 {
        return Err(TesterError::Parameter(format!(
            "alpha {} must be below epsilon/2 = {}",
            cfg.alpha,
            cfg.epsilon / 2.0
        )));
    }
    let schedule = SmallAlphaSchedule::new(cfg.epsilon, cfg.alpha, davg);
    let params = TesterParams {
        algorithm: Algorithm::SmallAlpha,
        epsilon: cfg.epsilon,
        alpha: cfg.alpha,
        davg: Some(davg),
        b: Some(schedule.b),
        bfs_case: Some(match schedule.case {
            SmallAlphaCase::VertexCap => "vertex-cap",
            SmallAlphaCase::EdgeCap => "edge-cap",
        }),
    };
    let cap = cfg.enforce_cap.then_some(schedule.cap);
    let mut s = QuerySession::new(g, cfg.seed);
    if let Some(limit) = cap {
        s.set_budget(Some(Budget {
            scope: BudgetScope::Total,
            limit,
        }));
    }

    for (k, &reps) in schedule.reps.iter().enumerate() {
        let level = k as u32 + 1;
        for _ in 0..reps {
            let v = s.sample_vertex();
            let stop = match schedule.case {
                SmallAlphaCase::VertexCap => schedule.stop_rule(level, 0),
                SmallAlphaCase::EdgeCap => match s.q_degree(v) {
                    Ok(d) => schedule.stop_rule(level, d),
                    Err(OracleError::BudgetExhausted(_)) => return Ok(finish(&s, None, cap, true, params)),
                    Err(e) => return Err(e.into()),
                },
            };
            let outcome = bfs_until(&mut s, v, stop, true)?;
            if outcome.budget_exhausted {
                return Ok(finish(&s, None, cap, true, params));
            }
            if let Some(w) = detect_plain_witness(&outcome) {
                return Ok(finish(&s, Some(w), cap, false, params));
            }
        }
    }
    Ok(finish(&s, None, cap, false, params))
}

/// Per-BFS neighbor-query allowance and repetition count of the mid-alpha
/// tester.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MidAlphaSchedule {
    pub b: f64,
    pub reps: u64,
    pub query_cap: u64,
}

impl MidAlphaSchedule {
    pub fn new(epsilon: f64, alpha: f64, davg: f64) -> Self {
        let b = 4.0 / ((epsilon - alpha) * davg);
        Self {
            b,
            reps: (b * LN_3).ceil() as u64,
            query_cap: (b * b).min(b * davg).floor() as u64,
        }
    }
}

/// Tester for `alpha < epsilon`, looking for generalized witnesses.
pub fn tester_mid_alpha(g: &PartiallyErasedGraph, cfg: &ConnTesterConfig) -> Result<TesterVerdict, TesterError> {
    let davg = cfg.check_common()?;
    if cfg.alpha >= cfg.epsilon {
        return Err(TesterError::Parameter(format!(
            "alpha {} must be below epsilon {}",
            cfg.alpha, cfg.epsilon
        )));
    }
    let schedule = MidAlphaSchedule::new(cfg.epsilon, cfg.alpha, davg);
    let params = TesterParams {
        algorithm: Algorithm::MidAlpha,
        epsilon: cfg.epsilon,
        alpha: cfg.alpha,
        davg: Some(davg),
        b: Some(schedule.b),
        bfs_case: None,
    };
    let mut s = QuerySession::new(g, cfg.seed);
    for _ in 0..schedule.reps {
        let v = s.sample_vertex();
        let outcome = bfs_with_erasure_limit(&mut s, v, StopRule::QueryCap(schedule.query_cap), Some(1))?;
        if let Some(w) = detect_generalized_witness(&outcome) {
            return Ok(finish(&s, Some(w), None, false, params));
        }
    }
    Ok(finish(&s, None, None, false, params))
}

/// One sample of the edge-budget BFS shared by the no-erasure and
/// unknown-degree testers. `Ok(None)` means the budget ran out.
fn edge_budget_step(s: &mut QuerySession<'_>, level: u32) -> Result<Option<Option<WitnessReport>>, OracleError> {
    let v = s.sample_vertex();
    let d = match s.q_degree(v) {
        Ok(d) => d,
        Err(OracleError::BudgetExhausted(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let cap = (1u64 << (level - 1)).saturating_mul(d as u64).saturating_add(1);
    let outcome = bfs_until(s, v, StopRule::EdgeCap(cap), true)?;
    if outcome.budget_exhausted {
        return Ok(None);
    }
    Ok(Some(detect_plain_witness(&outcome)))
}

/// Number of levels of the no-erasure tester, `ceil(log2(8/(epsilon·davg)))`.
pub fn no_erasure_levels(epsilon: f64, davg: f64) -> u32 {
    (8.0 / (epsilon * davg)).log2().ceil().max(1.0) as u32
}

/// Tester for graphs without erasures and known average degree.
pub fn tester_no_erasures(g: &PartiallyErasedGraph, cfg: &ConnTesterConfig) -> Result<TesterVerdict, TesterError> {
    let davg = cfg.check_common()?;
    if cfg.alpha != 0.0 {
        return Err(TesterError::Parameter(format!(
            "the no-erasure tester needs alpha = 0, got {}",
            cfg.alpha
        )));
    }
    let t = no_erasure_levels(cfg.epsilon, davg);
    let params = TesterParams {
        algorithm: Algorithm::NoErasure,
        epsilon: cfg.epsilon,
        alpha: 0.0,
        davg: Some(davg),
        b: Some(2.0 / (cfg.epsilon * davg)),
        bfs_case: Some("edge-cap"),
    };
    let mut s = QuerySession::new(g, cfg.seed);
    for i in 1..=t {
        let reps = (2f64.powi((t - i) as i32) * LN_6).ceil() as u64;
        for _ in 0..reps {
            if let Some(Some(w)) = edge_budget_step(&mut s, i)? {
                return Ok(finish(&s, Some(w), None, false, params));
            }
        }
    }
    Ok(finish(&s, None, None, false, params))
}

/// Neighbor-query budget of the unknown-degree tester for proximity
/// parameter `e`: `ceil((350/e)·log2(16/e))`.
pub fn unknown_davg_budget(e: f64) -> u64 {
    ((350.0 / e) * (16.0 / e).log2()).ceil() as u64
}

/// Largest outer round the unknown-degree tester runs before accepting.
/// Only reachable on graphs where no sample can ever cost a neighbor query.
pub const UNKNOWN_DAVG_MAX_ROUNDS: u32 = 62;

/// Tester without access to the average degree.
///
/// `cfg.alpha` shifts the proximity parameter to `epsilon − 2·alpha` and the
/// BFS halts at erasures; with `alpha = 0` this is the erasure-free tester.
pub fn tester_unknown_davg(g: &PartiallyErasedGraph, cfg: &ConnTesterConfig) -> Result<TesterVerdict, TesterError> {
    let e = cfg.epsilon - 2.0 * cfg.alpha;
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) || !(cfg.alpha >= 0.0) || !(e > 0.0) {
        return Err(TesterError::Parameter(format!(
            "need epsilon in (0, 1) and 0 <= alpha < epsilon/2, got epsilon {} alpha {}",
            cfg.epsilon, cfg.alpha
        )));
    }
    let budget = unknown_davg_budget(e);
    let params = TesterParams {
        algorithm: Algorithm::UnknownDavg,
        epsilon: cfg.epsilon,
        alpha: cfg.alpha,
        davg: None,
        b: None,
        bfs_case: Some("edge-cap"),
    };
    let mut s = QuerySession::new(g, cfg.seed).with_budget(Budget {
        scope: BudgetScope::Neighbor,
        limit: budget,
    });
    if g.num_vertices() == 1 {
        return Ok(finish(&s, None, Some(budget), false, params));
    }
    for t in 1..=UNKNOWN_DAVG_MAX_ROUNDS {
        for i in 1..=t {
            let reps = (2f64.powi(t.saturating_sub(i + 1) as i32) * LN_6).ceil() as u64;
            for _ in 0..reps {
                match edge_budget_step(&mut s, i)? {
                    None => return Ok(finish(&s, None, Some(budget), true, params)),
                    Some(Some(w)) => return Ok(finish(&s, Some(w), Some(budget), false, params)),
                    Some(None) => {}
                }
            }
        }
    }
    Ok(finish(&s, None, Some(budget), false, params))
}

/// Dispatches on `algorithm`.
pub fn run_tester(
    algorithm: Algorithm,
    g: &PartiallyErasedGraph,
    cfg: &ConnTesterConfig,
) -> Result<TesterVerdict, TesterError> {
    match algorithm {
        Algorithm::SmallAlpha => tester_small_alpha(g, cfg),
        Algorithm::MidAlpha => tester_mid_alpha(g, cfg),
        Algorithm::NoErasure => tester_no_erasures(g, cfg),
        Algorithm::UnknownDavg => tester_unknown_davg(g, cfg),
    }
}
