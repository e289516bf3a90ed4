//! Query access to a graph.
//!
//! Algorithms never read a [`PartiallyErasedGraph`] directly; they go through a
//! [`QuerySession`], which answers degree and neighbor queries, counts them,
//! enforces an optional budget, and owns the run's random source.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{AdjEntry, GraphError, PartiallyErasedGraph, VertexId};
use crate::rng::{rng_from_seed, TrialRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetScope {
    Degree,
    Neighbor,
    /// Degree and neighbor queries together.
    Total,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub scope: BudgetScope,
    pub limit: u64,
}

/// Charged query counters.
///
/// `degree` and `neighbor` are the charged totals. `random_draws` counts
/// uniform-random-neighbor draws and `implicit_degree` the degree queries that
/// such draws charged because the degree was not yet known; subtracting
/// `implicit_degree` from `degree` gives the accounting in which a random
/// neighbor draw is a single primitive query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounts {
    pub degree: u64,
    pub neighbor: u64,
    pub random_draws: u64,
    pub implicit_degree: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.degree + self.neighbor
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("query budget of {} {:?} queries exhausted", .0.limit, .0.scope)]
    BudgetExhausted(Budget),
    #[error("vertex {vertex} has degree {degree}, above the bound {bound}")]
    DegreeBoundExceeded {
        vertex: VertexId,
        degree: usize,
        bound: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Answer of a neighbor query in the bounded-degree model, where lists are
/// padded to length `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PaddedEntry {
    Entry(AdjEntry),
    Blank,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Degree,
    Neighbor,
}

pub struct QuerySession<'g> {
    graph: &'g PartiallyErasedGraph,
    counts: QueryCounts,
    budget: Option<Budget>,
    rng: TrialRng,
    seed: u64,
    known_degrees: HashMap<VertexId, usize>,
    trace: Option<Vec<String>>,
}

impl<'g> QuerySession<'g> {
    pub fn new(graph: &'g PartiallyErasedGraph, seed: u64) -> Self {
        Self {
            graph,
            counts: QueryCounts::default(),
            budget: None,
            rng: rng_from_seed(seed),
            seed,
            known_degrees: HashMap::new(),
            trace: None,
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn set_budget(&mut self, budget: Option<Budget>) {
        self.budget = budget;
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn graph(&self) -> &'g PartiallyErasedGraph {
        self.graph
    }

    /// `n` is part of the model's input, so reading it is free.
    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn counts(&self) -> QueryCounts {
        self.counts
    }

    pub fn budget(&self) -> Option<Budget> {
        self.budget
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&mut self) -> &mut TrialRng {
        &mut self.rng
    }

    /// Trace records, one per answered query, when tracing is enabled.
    pub fn trace(&self) -> Option<&[String]> {
        self.trace.as_deref()
    }

    pub fn sample_vertex(&mut self) -> VertexId {
        self.rng.gen_range(0..self.graph.num_vertices())
    }

    fn charge(&mut self, kind: Kind) -> Result<(), OracleError> {
        if let Some(budget) = self.budget {
            let used = match budget.scope {
                BudgetScope::Degree if kind == Kind::Degree => Some(self.counts.degree),
                BudgetScope::Neighbor if kind == Kind::Neighbor => Some(self.counts.neighbor),
                BudgetScope::Total => Some(self.counts.total()),
                _ => None,
            };
            if used.is_some_and(|u| u >= budget.limit) {
                return Err(OracleError::BudgetExhausted(budget));
            }
        }
        match kind {
            Kind::Degree => self.counts.degree += 1,
            Kind::Neighbor => self.counts.neighbor += 1,
        }
        Ok(())
    }

    fn log(&mut self, record: impl FnOnce() -> String) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(record());
        }
    }

    pub fn q_degree(&mut self, u: VertexId) -> Result<usize, OracleError> {
        let d = self.graph.degree(u)?;
        self.charge(Kind::Degree)?;
        self.known_degrees.insert(u, d);
        self.log(|| format!("D {u}"));
        Ok(d)
    }

    /// The degree of `u`, charging a degree query only the first time.
    pub fn degree_cached(&mut self, u: VertexId) -> Result<usize, OracleError> {
        match self.known_degrees.get(&u) {
            Some(&d) => Ok(d),
            None => self.q_degree(u),
        }
    }

    pub fn degree_known(&self, u: VertexId) -> Option<usize> {
        self.known_degrees.get(&u).copied()
    }

    /// The `i`-th entry of `adj(u)`, 1-based.
    pub fn q_neighbor(&mut self, u: VertexId, i: usize) -> Result<AdjEntry, OracleError> {
        let entry = self.graph.neighbor(u, i)?;
        self.charge(Kind::Neighbor)?;
        self.log(|| format!("N {u} {i} -> {entry}"));
        Ok(entry)
    }

    /// A uniformly random entry of `adj(u)`, or `None` when `u` has degree 0.
    ///
    /// Charges a degree query first unless the degree is already known to
    /// this session; a degree-0 vertex costs no neighbor query.
    pub fn q_random_neighbor(&mut self, u: VertexId) -> Result<Option<AdjEntry>, OracleError> {
        let d = match self.known_degrees.get(&u) {
            Some(&d) => d,
            None => {
                let d = self.q_degree(u)?;
                self.counts.implicit_degree += 1;
                d
            }
        };
        if d == 0 {
            return Ok(None);
        }
        let i = self.rng.gen_range(1..=d);
        let entry = self.q_neighbor(u, i)?;
        self.counts.random_draws += 1;
        Ok(Some(entry))
    }

    /// Neighbor query in the bounded-degree model: slot `i` of `adj(u)`
    /// padded with blanks to length `bound`.
    pub fn q_padded_neighbor(
        &mut self,
        u: VertexId,
        i: usize,
        bound: usize,
    ) -> Result<PaddedEntry, OracleError> {
        let degree = self.graph.degree(u)?;
        if degree > bound {
            return Err(OracleError::DegreeBoundExceeded {
                vertex: u,
                degree,
                bound,
            });
        }
        if i == 0 || i > bound {
            return Err(GraphError::IndexOutOfRange {
                vertex: u,
                index: i,
                degree: bound,
            }
            .into());
        }
        if i <= degree {
            return self.q_neighbor(u, i).map(PaddedEntry::Entry);
        }
        self.charge(Kind::Neighbor)?;
        self.log(|| format!("N {u} {i} -> -"));
        Ok(PaddedEntry::Blank)
    }
}

/// Entry of a reconstructed list of the nonerased subgraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FilteredEntry {
    Vertex(VertexId),
    Blank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterQuery {
    Degree(VertexId),
    Neighbor(VertexId, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterAnswer {
    Degree(usize),
    Entry(FilteredEntry),
}

/// Answers bounded-degree queries about the subgraph `G*` formed by the
/// nonerased edges (those listed in both directions).
///
/// A list of `G*` is rebuilt on first use: scan `adj(u)` up to the first
/// blank, and for every nonerased entry `w` scan `adj(w)` until `u` or a blank
/// shows up. That is at most `D` queries for `u` plus `D` per entry, so
/// `D·(D + 1)` per cache miss. Cached lists cost nothing.
#[derive(Clone, Debug)]
pub struct FilterOracle {
    degree_bound: usize,
    cache: HashMap<VertexId, Vec<VertexId>>,
    miss_charges: Vec<(VertexId, u64)>,
}

impl FilterOracle {
    pub fn new(degree_bound: usize) -> Self {
        Self {
            degree_bound,
            cache: HashMap::new(),
            miss_charges: Vec::new(),
        }
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Underlying queries charged by each cache miss, in order.
    pub fn miss_charges(&self) -> &[(VertexId, u64)] {
        &self.miss_charges
    }

    /// The nonerased neighbors of `u`, in `adj(u)` order.
    pub fn list(&mut self, s: &mut QuerySession<'_>, u: VertexId) -> Result<&[VertexId], OracleError> {
        if !self.cache.contains_key(&u) {
            let d = self.degree_bound;
            let before = s.counts().total();
            let mut list = Vec::new();
            for i in 1..=d {
                let w = match s.q_padded_neighbor(u, i, d)? {
                    PaddedEntry::Blank => break,
                    PaddedEntry::Entry(AdjEntry::Erased) => continue,
                    PaddedEntry::Entry(AdjEntry::Vertex(w)) => w,
                };
                for j in 1..=d {
                    match s.q_padded_neighbor(w, j, d)? {
                        PaddedEntry::Blank => break,
                        PaddedEntry::Entry(AdjEntry::Vertex(x)) if x == u => {
                            list.push(w);
                            break;
                        }
                        PaddedEntry::Entry(_) => {}
                    }
                }
            }
            self.miss_charges.push((u, s.counts().total() - before));
            self.cache.insert(u, list);
        }
        Ok(&self.cache[&u])
    }

    pub fn degree(&mut self, s: &mut QuerySession<'_>, u: VertexId) -> Result<usize, OracleError> {
        Ok(self.list(s, u)?.len())
    }

    /// Slot `i` (1-based, up to `D`) of the padded list of `u` in `G*`.
    pub fn neighbor(
        &mut self,
        s: &mut QuerySession<'_>,
        u: VertexId,
        i: usize,
    ) -> Result<FilteredEntry, OracleError> {
        if i == 0 || i > self.degree_bound {
            return Err(GraphError::IndexOutOfRange {
                vertex: u,
                index: i,
                degree: self.degree_bound,
            }
            .into());
        }
        Ok(match self.list(s, u)?.get(i - 1) {
            Some(&w) => FilteredEntry::Vertex(w),
            None => FilteredEntry::Blank,
        })
    }

    pub fn query(&mut self, s: &mut QuerySession<'_>, q: FilterQuery) -> Result<FilterAnswer, OracleError> {
        match q {
            FilterQuery::Degree(u) => self.degree(s, u).map(FilterAnswer::Degree),
            FilterQuery::Neighbor(u, i) => self.neighbor(s, u, i).map(FilterAnswer::Entry),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use AdjEntry::{Erased, Vertex};

    fn path() -> PartiallyErasedGraph {
        PartiallyErasedGraph::from_lists(vec![vec![Vertex(1)], vec![Erased, Vertex(2)], vec![Vertex(1)]]).unwrap()
    }

    #[test]
    fn degree_queries_are_counted_without_dedup() {
        let g = path();
        let mut s = QuerySession::new(&g, 1);
        assert_eq!(s.q_degree(1).unwrap(), 2);
        assert_eq!(s.q_degree(1).unwrap(), 2);
        assert_eq!(s.counts().degree, 2);
        assert_eq!(s.counts().neighbor, 0);
    }

    #[test]
    fn zero_budget_refuses_and_leaves_counters() {
        let g = path();
        let mut s = QuerySession::new(&g, 1).with_budget(Budget {
            scope: BudgetScope::Degree,
            limit: 0,
        });
        assert!(matches!(s.q_degree(0), Err(OracleError::BudgetExhausted(_))));
        assert_eq!(s.counts(), QueryCounts::default());
        // a degree budget does not restrict neighbor queries
        assert_eq!(s.q_neighbor(1, 1).unwrap(), Erased);
    }

    #[test]
    fn neighbor_errors_are_distinct_from_erasure() {
        let g = path();
        let mut s = QuerySession::new(&g, 1);
        assert_eq!(s.q_neighbor(1, 1).unwrap(), Erased);
        assert!(matches!(s.q_neighbor(1, 3), Err(OracleError::Graph(GraphError::IndexOutOfRange { .. }))));
        assert_eq!(s.counts().neighbor, 1);
    }

    #[test]
    fn random_neighbor_charges_degree_once() {
        let g = path();
        let mut s = QuerySession::new(&g, 1);
        assert_eq!(s.q_random_neighbor(0).unwrap(), Some(Vertex(1)));
        assert_eq!(s.q_random_neighbor(0).unwrap(), Some(Vertex(1)));
        let c = s.counts();
        assert_eq!((c.degree, c.neighbor, c.random_draws, c.implicit_degree), (1, 2, 2, 1));
    }

    #[test]
    fn random_neighbor_on_isolated_vertex() {
        let g = PartiallyErasedGraph::from_lists(vec![vec![]]).unwrap();
        let mut s = QuerySession::new(&g, 1);
        assert_eq!(s.q_random_neighbor(0).unwrap(), None);
        assert_eq!(s.counts().neighbor, 0);
        assert_eq!(s.counts().degree, 1);
    }

    #[test]
    fn trace_records_queries() {
        let g = path();
        let mut s = QuerySession::new(&g, 1).with_trace();
        s.q_degree(1).unwrap();
        s.q_neighbor(1, 1).unwrap();
        s.q_neighbor(1, 2).unwrap();
        s.q_padded_neighbor(0, 2, 2).unwrap();
        assert_eq!(s.trace().unwrap(), ["D 1", "N 1 1 -> *", "N 1 2 -> 2", "N 0 2 -> -"]);
    }

    #[test]
    fn filter_drops_half_erased_edges() {
        let g = path();
        let mut s = QuerySession::new(&g, 1);
        let mut f = FilterOracle::new(2);
        assert_eq!(f.list(&mut s, 0).unwrap(), &[] as &[usize]);
        assert_eq!(f.list(&mut s, 1).unwrap(), &[2]);
        assert_eq!(f.neighbor(&mut s, 2, 1).unwrap(), FilteredEntry::Vertex(1));
        assert_eq!(f.neighbor(&mut s, 2, 2).unwrap(), FilteredEntry::Blank);
        let before = s.counts();
        assert_eq!(f.query(&mut s, FilterQuery::Degree(1)).unwrap(), FilterAnswer::Degree(1));
        assert_eq!(s.counts(), before);
        for &(_, c) in f.miss_charges() {
            assert!(c <= 6);
        }
    }

    #[test]
    fn filter_rejects_high_degree() {
        let g = path();
        let mut s = QuerySession::new(&g, 1);
        let mut f = FilterOracle::new(1);
        assert!(matches!(f.list(&mut s, 1), Err(OracleError::DegreeBoundExceeded { .. })));
    }
}
