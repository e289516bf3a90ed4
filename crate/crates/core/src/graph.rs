//! Adjacency-list graphs in which some list entries have been erased.
//!
//! A [`PartiallyErasedGraph`] stores, for every vertex, an ordered list of
//! [`AdjEntry`] values. Entry order is significant: neighbor queries address
//! entries by index, so nothing in this module reorders a list.
//!
//! Vertex labels are the dense integers `0..n`. Wherever a total order on
//! labels is needed (for example the degree-then-label vertex ranking used by
//! the average-degree estimator) the numeric order of ids is used.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

/// Dense vertex identifier in `0..n`.
pub type VertexId = usize;

/// One slot of an adjacency list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AdjEntry {
    Vertex(VertexId),
    /// The erasure mark; the slot holds some neighbor in every completion,
    /// but its identity is hidden.
    Erased,
}

impl AdjEntry {
    pub fn vertex(self) -> Option<VertexId> {
        match self {
            AdjEntry::Vertex(v) => Some(v),
            AdjEntry::Erased => None,
        }
    }

    pub fn is_erased(self) -> bool {
        matches!(self, AdjEntry::Erased)
    }
}

impl fmt::Display for AdjEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdjEntry::Vertex(v) => write!(f, "{v}"),
            AdjEntry::Erased => f.write_str("*"),
        }
    }
}

/// How a pair of distinct vertices is represented in the lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeStatus {
    /// Each vertex lists the other.
    NonErased,
    /// `to` appears in `adj(from)` but `from` does not appear in `adj(to)`.
    HalfErased { from: VertexId, to: VertexId },
    /// Neither vertex lists the other.
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} is out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("entry index {index} is out of range for vertex {vertex} of degree {degree}")]
    IndexOutOfRange {
        vertex: VertexId,
        index: usize,
        degree: usize,
    },
    #[error("expected two distinct vertices, got {0} twice")]
    SameVertex(VertexId),
}

/// A broken invariant or a certificate that no completion exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    SelfLoop { vertex: VertexId, slot: usize },
    DuplicateEntry { vertex: VertexId, neighbor: VertexId },
    OddTotalLength { total: usize },
    /// Vertex `vertex` is the target of `demand` half-erased edges but only
    /// has `erased_slots` erased entries to receive them.
    UnfillableHalfErasedEdges {
        vertex: VertexId,
        demand: usize,
        erased_slots: usize,
    },
    /// After the forced fills, `vertex` still has `free_slots` erased entries
    /// but only `candidates` vertices could legally occupy them.
    TooFewPartners {
        vertex: VertexId,
        free_slots: usize,
        candidates: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { vertex, slot } => {
                write!(f, "vertex {vertex} lists itself at slot {slot}")
            }
            Violation::DuplicateEntry { vertex, neighbor } => {
                write!(f, "vertex {vertex} lists {neighbor} more than once")
            }
            Violation::OddTotalLength { total } => {
                write!(f, "total list length {total} is odd")
            }
            Violation::UnfillableHalfErasedEdges {
                vertex,
                demand,
                erased_slots,
            } => write!(
                f,
                "vertex {vertex} must absorb {demand} half-erased edges but has {erased_slots} erased slots"
            ),
            Violation::TooFewPartners {
                vertex,
                free_slots,
                candidates,
            } => write!(
                f,
                "vertex {vertex} has {free_slots} open erased slots but only {candidates} possible partners"
            ),
        }
    }
}

/// Adjacency lists over `n` vertices with possibly erased entries.
///
/// Stored in compressed form: `entries[offsets[u]..offsets[u + 1]]` is
/// `adj(u)`. The number of edges `m` is derived from the total list length
/// and never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartiallyErasedGraph {
    offsets: Vec<usize>,
    entries: Vec<AdjEntry>,
}

impl PartiallyErasedGraph {
    /// Builds a graph from per-vertex lists.
    ///
    /// Only structural problems that would make queries ill-defined are
    /// rejected here (no vertices, ids out of range). Self-loops, duplicates
    /// and uncompletable erasure patterns are representable and reported by
    /// [`validate`](Self::validate).
    pub fn from_lists(lists: Vec<Vec<AdjEntry>>) -> Result<Self, GraphError> {
        let n = lists.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut entries = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        offsets.push(0);
        for list in lists {
            for entry in list {
                if let AdjEntry::Vertex(v) = entry {
                    if v >= n {
                        return Err(GraphError::VertexOutOfRange { vertex: v, n });
                    }
                }
                entries.push(entry);
            }
            offsets.push(entries.len());
        }
        Ok(Self { offsets, entries })
    }

    /// Erasure-free graph from an edge list; each list follows edge order.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut lists = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            lists[u].push(AdjEntry::Vertex(v));
            lists[v].push(AdjEntry::Vertex(u));
        }
        Self::from_lists(lists)
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Total length of all lists, `2m` for a valid graph.
    pub fn total_entries(&self) -> usize {
        self.entries.len()
    }

    /// Number of edges in every completion: half the total list length.
    pub fn num_edges(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn average_degree(&self) -> f64 {
        self.entries.len() as f64 / self.num_vertices() as f64
    }

    pub fn average_degree_exact(&self) -> Rational {
        Rational::new(self.entries.len() as i128, self.num_vertices() as i128)
    }

    fn check_vertex(&self, u: VertexId) -> Result<(), GraphError> {
        if u < self.num_vertices() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: u,
                n: self.num_vertices(),
            })
        }
    }

    /// `deg(u)`: the list length, identical in every completion.
    pub fn degree(&self, u: VertexId) -> Result<usize, GraphError> {
        self.check_vertex(u)?;
        Ok(self.offsets[u + 1] - self.offsets[u])
    }

    /// The `index`-th entry of `adj(u)`, counting from 1.
    pub fn neighbor(&self, u: VertexId, index: usize) -> Result<AdjEntry, GraphError> {
        let degree = self.degree(u)?;
        if index == 0 || index > degree {
            return Err(GraphError::IndexOutOfRange {
                vertex: u,
                index,
                degree,
            });
        }
        Ok(self.entries[self.offsets[u] + index - 1])
    }

    /// Direct slice access for oracles and generators. Panics if `u >= n`.
    pub fn adj(&self, u: VertexId) -> &[AdjEntry] {
        &self.entries[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Whether `v` appears as a non-erased entry of `adj(u)`.
    pub fn lists(&self, u: VertexId, v: VertexId) -> bool {
        self.adj(u).contains(&AdjEntry::Vertex(v))
    }

    pub fn erased_in(&self, u: VertexId) -> usize {
        self.adj(u).iter().filter(|e| e.is_erased()).count()
    }

    pub fn erased_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_erased()).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices())
            .map(|u| self.offsets[u + 1] - self.offsets[u])
            .max()
            .unwrap_or(0)
    }

    /// Fraction of erased entries among all `2m` entries (0 for an empty edge set).
    pub fn erasure_fraction(&self) -> Rational {
        if self.entries.is_empty() {
            return Rational::from_integer(0);
        }
        Rational::new(self.erased_count() as i128, self.entries.len() as i128)
    }

    pub fn classify_pair(&self, u: VertexId, v: VertexId) -> Result<EdgeStatus, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SameVertex(u));
        }
        Ok(match (self.lists(u, v), self.lists(v, u)) {
            (true, true) => EdgeStatus::NonErased,
            (true, false) => EdgeStatus::HalfErased { from: u, to: v },
            (false, true) => EdgeStatus::HalfErased { from: v, to: u },
            (false, false) => EdgeStatus::Absent,
        })
    }

    /// All half-erased edges as `(from, to)` with `to ∈ adj(from)`, `from ∉ adj(to)`.
    pub fn half_erased_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in 0..self.num_vertices() {
            for entry in self.adj(u) {
                if let AdjEntry::Vertex(v) = *entry {
                    if v != u && !self.lists(v, u) {
                        out.push((u, v));
                    }
                }
            }
        }
        out
    }

    /// Undirected edges formed by non-erased entries, `(min, max)`; includes
    /// half-erased edges, which every completion must contain.
    pub fn known_edges(&self) -> BTreeSet<(VertexId, VertexId)> {
        let mut out = BTreeSet::new();
        for u in 0..self.num_vertices() {
            for entry in self.adj(u) {
                if let AdjEntry::Vertex(v) = *entry {
                    if v != u {
                        out.insert((u.min(v), u.max(v)));
                    }
                }
            }
        }
        out
    }

    /// Checks the list invariants and necessary conditions for a completion.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let n = self.num_vertices();
        let mut violations = Vec::new();

        for u in 0..n {
            let mut seen = HashSet::new();
            for (slot, entry) in self.adj(u).iter().enumerate() {
                if let AdjEntry::Vertex(v) = *entry {
                    if v == u {
                        violations.push(Violation::SelfLoop {
                            vertex: u,
                            slot: slot + 1,
                        });
                    } else if !seen.insert(v) {
                        violations.push(Violation::DuplicateEntry {
                            vertex: u,
                            neighbor: v,
                        });
                    }
                }
            }
        }
        if self.entries.len() % 2 == 1 {
            violations.push(Violation::OddTotalLength {
                total: self.entries.len(),
            });
        }

        let mut demand = vec![0usize; n];
        for (_, to) in self.half_erased_edges() {
            demand[to] += 1;
        }
        let mut free = vec![0usize; n];
        for u in 0..n {
            let slots = self.erased_in(u);
            if demand[u] > slots {
                violations.push(Violation::UnfillableHalfErasedEdges {
                    vertex: u,
                    demand: demand[u],
                    erased_slots: slots,
                });
            } else {
                free[u] = slots - demand[u];
            }
        }

        // An open slot at u must be matched with an open slot at a vertex not
        // already joined to u.
        if violations.is_empty() {
            let edges = self.known_edges();
            let open: Vec<VertexId> = (0..n).filter(|&u| free[u] > 0).collect();
            for &u in &open {
                let candidates = open
                    .iter()
                    .filter(|&&w| w != u && !edges.contains(&(u.min(w), u.max(w))))
                    .count();
                if free[u] > candidates {
                    violations.push(Violation::TooFewPartners {
                        vertex: u,
                        free_slots: free[u],
                        candidates,
                    });
                }
            }
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Copies the lists out, e.g. to edit and rebuild.
    pub fn to_lists(&self) -> Vec<Vec<AdjEntry>> {
        (0..self.num_vertices()).map(|u| self.adj(u).to_vec()).collect()
    }

    /// Relabels vertex `u` as `perm[u]`, keeping every list's entry order.
    pub fn relabel(&self, perm: &[VertexId]) -> Result<Self, GraphError> {
        let n = self.num_vertices();
        let mut lists = vec![Vec::new(); n];
        for u in 0..n {
            lists[perm[u]] = self
                .adj(u)
                .iter()
                .map(|e| match *e {
                    AdjEntry::Vertex(v) => AdjEntry::Vertex(perm[v]),
                    AdjEntry::Erased => AdjEntry::Erased,
                })
                .collect();
        }
        Self::from_lists(lists)
    }
}

/// An assignment of vertex ids to erased slots.
///
/// Keys are `(vertex, slot)` with 1-based slot indices, matching neighbor
/// queries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Completion {
    pub assignment: BTreeMap<(VertexId, usize), VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("slot {slot} of vertex {vertex} is not an erased slot")]
    NotErased { vertex: VertexId, slot: usize },
    #[error("erased slot {slot} of vertex {vertex} has no assignment")]
    Unassigned { vertex: VertexId, slot: usize },
    #[error("completed lists are not a simple undirected graph: {0}")]
    Invalid(String),
}

impl Completion {
    /// Fills every erased slot and checks that the result is a simple,
    /// symmetric adjacency structure.
    pub fn apply(&self, g: &PartiallyErasedGraph) -> Result<Vec<Vec<VertexId>>, CompletionError> {
        for &(vertex, slot) in self.assignment.keys() {
            let is_erased = vertex < g.num_vertices()
                && slot >= 1
                && g.adj(vertex).get(slot - 1) == Some(&AdjEntry::Erased);
            if !is_erased {
                return Err(CompletionError::NotErased { vertex, slot });
            }
        }
        let n = g.num_vertices();
        let mut lists = Vec::with_capacity(n);
        for u in 0..n {
            let mut list = Vec::with_capacity(g.adj(u).len());
            for (i, entry) in g.adj(u).iter().enumerate() {
                match *entry {
                    AdjEntry::Vertex(v) => list.push(v),
                    AdjEntry::Erased => {
                        let v = self.assignment.get(&(u, i + 1)).copied().ok_or(
                            CompletionError::Unassigned {
                                vertex: u,
                                slot: i + 1,
                            },
                        )?;
                        list.push(v);
                    }
                }
            }
            lists.push(list);
        }
        check_simple_symmetric(&lists).map_err(CompletionError::Invalid)?;
        Ok(lists)
    }

    /// The completed graph's edge set, `(min, max)` pairs.
    pub fn edges(
        &self,
        g: &PartiallyErasedGraph,
    ) -> Result<BTreeSet<(VertexId, VertexId)>, CompletionError> {
        let lists = self.apply(g)?;
        Ok(lists
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&v| (u.min(v), u.max(v))))
            .collect())
    }
}

/// Checks that fully specified lists describe a simple undirected graph.
pub fn check_simple_symmetric(lists: &[Vec<VertexId>]) -> Result<(), String> {
    let n = lists.len();
    let sets: Vec<HashSet<VertexId>> = lists.iter().map(|l| l.iter().copied().collect()).collect();
    for (u, list) in lists.iter().enumerate() {
        if sets[u].len() != list.len() {
            return Err(format!("vertex {u} has a repeated neighbor"));
        }
        for &v in list {
            if v >= n {
                return Err(format!("vertex {u} lists out-of-range id {v}"));
            }
            if v == u {
                return Err(format!("vertex {u} lists itself"));
            }
            if !sets[v].contains(&u) {
                return Err(format!("{u} lists {v} but not vice versa"));
            }
        }
    }
    Ok(())
}

/// Replaces the given 1-based slots of complete lists with erasure marks.
pub fn erase_slots(
    lists: &[Vec<VertexId>],
    slots: impl IntoIterator<Item = (VertexId, usize)>,
) -> Result<PartiallyErasedGraph, GraphError> {
    let mut out: Vec<Vec<AdjEntry>> = lists
        .iter()
        .map(|l| l.iter().map(|&v| AdjEntry::Vertex(v)).collect())
        .collect();
    for (u, slot) in slots {
        let degree = out.get(u).map(Vec::len).unwrap_or(0);
        if u >= out.len() || slot == 0 || slot > degree {
            return Err(GraphError::IndexOutOfRange {
                vertex: u,
                index: slot,
                degree,
            });
        }
        out[u][slot - 1] = AdjEntry::Erased;
    }
    PartiallyErasedGraph::from_lists(out)
}
