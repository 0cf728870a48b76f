//! Partially directed graphs over `d` nodes.
//!
//! Every node keeps three adjacency sets (parents, children, undirected
//! neighbors). The sets are kept symmetric by all mutating methods, so
//! `y ∈ parents(x)` iff `x ∈ children(y)` and `y ∈ neighbors(x)` iff
//! `x ∈ neighbors(y)`.

mod cpdag;
pub mod io;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::NodeId;

pub use cpdag::{complete_pdag, consistent_extension, dag_to_cpdag, mec_equal};

/// The seven single-edge updates between two nodes `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    /// none → a − b
    AddUndirected,
    /// none → a → b
    AddDirected,
    /// a − b → none
    RemoveUndirected,
    /// a − b → a → b
    Orient,
    /// a → b → none
    RemoveDirected,
    /// a → b → a − b
    Unorient,
    /// a → b → a ← b
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeChange {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: EdgeKind,
}

impl EdgeChange {
    pub fn new(a: NodeId, b: NodeId, kind: EdgeKind) -> Self {
        EdgeChange { a, b, kind }
    }
}

/// Status of an unordered pair `{a, b}` seen from `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairStatus {
    None,
    Undirected,
    /// a → b
    Forward,
    /// a ← b
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pdag {
    d: usize,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    neighbors: Vec<NodeSet>,
}

impl Pdag {
    pub fn new(d: usize) -> Self {
        Pdag {
            d,
            parents: vec![NodeSet::new(); d],
            children: vec![NodeSet::new(); d],
            neighbors: vec![NodeSet::new(); d],
        }
    }

    /// Builds a graph from edge lists, rejecting out-of-range nodes,
    /// self-loops, duplicate pairs and directed cycles.
    pub fn from_edges(
        d: usize,
        directed: &[(NodeId, NodeId)],
        undirected: &[(NodeId, NodeId)],
    ) -> Result<Self> {
        let mut g = Pdag::new(d);
        let edges = directed
            .iter()
            .map(|&e| (e, true))
            .chain(undirected.iter().map(|&e| (e, false)));
        for ((a, b), is_directed) in edges {
            if a >= d || b >= d {
                return Err(Error::Parse(format!("edge ({a}, {b}) out of range for d={d}")));
            }
            if a == b {
                return Err(Error::Parse(format!("self-loop on node {a}")));
            }
            if g.is_adjacent(a, b) {
                return Err(Error::Parse(format!("duplicate edge between {a} and {b}")));
            }
            if is_directed {
                g.add_directed(a, b);
            } else {
                g.add_undirected(a, b);
            }
        }
        if !g.is_acyclic() {
            return Err(Error::Cyclic);
        }
        Ok(g)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn parents(&self, x: NodeId) -> &NodeSet {
        &self.parents[x]
    }

    #[inline]
    pub fn children(&self, x: NodeId) -> &NodeSet {
        &self.children[x]
    }

    #[inline]
    pub fn neighbors(&self, x: NodeId) -> &NodeSet {
        &self.neighbors[x]
    }

    pub fn adjacent(&self, x: NodeId) -> NodeSet {
        let mut s = self.parents[x].union(&self.children[x]);
        s.union_with(&self.neighbors[x]);
        s
    }

    #[inline]
    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.parents[a].contains(b) || self.children[a].contains(b) || self.neighbors[a].contains(b)
    }

    #[inline]
    pub fn has_directed(&self, a: NodeId, b: NodeId) -> bool {
        self.children[a].contains(b)
    }

    #[inline]
    pub fn has_undirected(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors[a].contains(b)
    }

    pub fn status(&self, a: NodeId, b: NodeId) -> PairStatus {
        if self.children[a].contains(b) {
            PairStatus::Forward
        } else if self.parents[a].contains(b) {
            PairStatus::Backward
        } else if self.neighbors[a].contains(b) {
            PairStatus::Undirected
        } else {
            PairStatus::None
        }
    }

    pub fn num_edges(&self) -> usize {
        let directed: usize = self.children.iter().map(NodeSet::len).sum();
        let undirected: usize = self.neighbors.iter().map(NodeSet::len).sum();
        directed + undirected / 2
    }

    pub fn directed_edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.d)
            .flat_map(|a| self.children[a].iter().map(move |b| (a, b)))
            .collect()
    }

    /// Undirected edges as `(a, b)` with `a < b`.
    pub fn undirected_edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.d)
            .flat_map(|a| self.neighbors[a].iter().filter(move |&b| a < b).map(move |b| (a, b)))
            .collect()
    }

    pub fn add_directed(&mut self, a: NodeId, b: NodeId) {
        self.children[a].insert(b);
        self.parents[b].insert(a);
    }

    pub fn add_undirected(&mut self, a: NodeId, b: NodeId) {
        self.neighbors[a].insert(b);
        self.neighbors[b].insert(a);
    }

    /// Removes whatever edge joins `a` and `b`.
    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) {
        self.children[a].remove(b);
        self.parents[b].remove(a);
        self.children[b].remove(a);
        self.parents[a].remove(b);
        self.neighbors[a].remove(b);
        self.neighbors[b].remove(a);
    }

    /// Applies a single-edge update after checking its before-state.
    pub fn apply_change(&mut self, c: EdgeChange) -> Result<()> {
        let EdgeChange { a, b, kind } = c;
        if a == b || a >= self.d || b >= self.d {
            return Err(Error::ChangeMismatch(c));
        }
        let before = self.status(a, b);
        let expected = match kind {
            EdgeKind::AddUndirected | EdgeKind::AddDirected => PairStatus::None,
            EdgeKind::RemoveUndirected | EdgeKind::Orient => PairStatus::Undirected,
            EdgeKind::RemoveDirected | EdgeKind::Unorient | EdgeKind::Reverse => PairStatus::Forward,
        };
        if before != expected {
            return Err(Error::ChangeMismatch(c));
        }
        self.remove_edge(a, b);
        match kind {
            EdgeKind::AddUndirected | EdgeKind::Unorient => self.add_undirected(a, b),
            EdgeKind::AddDirected | EdgeKind::Orient => self.add_directed(a, b),
            EdgeKind::Reverse => self.add_directed(b, a),
            EdgeKind::RemoveUndirected | EdgeKind::RemoveDirected => {}
        }
        debug_assert!(self.pair_consistent(a, b));
        Ok(())
    }

    fn pair_consistent(&self, a: NodeId, b: NodeId) -> bool {
        let ab = [
            self.children[a].contains(b),
            self.parents[a].contains(b),
            self.neighbors[a].contains(b),
        ];
        let ba = [
            self.parents[b].contains(a),
            self.children[b].contains(a),
            self.neighbors[b].contains(a),
        ];
        ab == ba && ab.iter().filter(|&&v| v).count() <= 1
    }

    /// Checks symmetry, exclusivity and the absence of self-loops.
    pub fn check_invariants(&self) -> bool {
        (0..self.d).all(|a| {
            !self.adjacent(a).contains(a)
                && self.adjacent(a).iter().all(|b| b < self.d && self.pair_consistent(a, b))
        })
    }

    pub fn is_clique(&self, s: &NodeSet) -> bool {
        let members = s.to_vec();
        members.iter().enumerate().all(|(i, &a)| {
            let adj = self.adjacent(a);
            members[i + 1..].iter().all(|&b| adj.contains(b))
        })
    }

    /// Breadth-first search for a semi-directed path `from ⇝ to` whose
    /// intermediate nodes avoid `blocked`. A directed edge in `ignored_edge`
    /// is never traversed. Returns the node sequence of a shortest such path.
    pub fn find_semidirected_path(
        &self,
        from: NodeId,
        to: NodeId,
        blocked: &NodeSet,
        ignored_edge: Option<(NodeId, NodeId)>,
    ) -> Option<Vec<NodeId>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut prev = vec![usize::MAX; self.d];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for v in self.children[u].iter().chain(self.neighbors[u].iter()) {
                if prev[v] != usize::MAX || ignored_edge == Some((u, v)) {
                    continue;
                }
                if v != to && blocked.contains(v) {
                    continue;
                }
                prev[v] = u;
                if v == to {
                    let mut path = vec![to];
                    let mut cur = to;
                    while cur != from {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// All unshielded colliders `(x, y, z)` with `x < z`, sorted.
    pub fn v_structures(&self) -> Vec<(NodeId, NodeId, NodeId)> {
        let mut out = Vec::new();
        for y in 0..self.d {
            let pa = self.parents[y].to_vec();
            for (i, &x) in pa.iter().enumerate() {
                for &z in &pa[i + 1..] {
                    if !self.is_adjacent(x, z) {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Topological order of the directed part, smallest index first among
    /// ready nodes. Undirected edges are ignored.
    pub fn topological_order(&self) -> Result<Vec<NodeId>> {
        let mut indeg: Vec<usize> = self.parents.iter().map(NodeSet::len).collect();
        let mut ready: BinaryHeap<Reverse<NodeId>> =
            (0..self.d).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.d);
        while let Some(Reverse(u)) = ready.pop() {
            order.push(u);
            for v in &self.children[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(Reverse(v));
                }
            }
        }
        if order.len() == self.d {
            Ok(order)
        } else {
            Err(Error::Cyclic)
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    pub fn is_dag(&self) -> bool {
        self.neighbors.iter().all(NodeSet::is_empty) && self.is_acyclic()
    }

    /// Skeleton as a sorted list of `(a, b)` pairs with `a < b`.
    pub fn skeleton(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.d)
            .flat_map(|a| {
                let adj = self.adjacent(a);
                adj.iter().filter(move |&b| a < b).map(move |b| (a, b)).collect::<Vec<_>>()
            })
            .collect()
    }
}

/// A fully directed acyclic graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dag(Pdag);

impl Dag {
    pub fn new(d: usize) -> Self {
        Dag(Pdag::new(d))
    }

    pub fn from_pdag(g: Pdag) -> Result<Self> {
        if g.neighbors.iter().any(|n| !n.is_empty()) {
            return Err(Error::InvalidArgument("graph has undirected edges".into()));
        }
        if !g.is_acyclic() {
            return Err(Error::Cyclic);
        }
        Ok(Dag(g))
    }

    pub fn from_edges(d: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        Pdag::from_edges(d, edges, &[]).map(Dag)
    }

    /// Adds `a → b` without an acyclicity check.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) {
        self.0.add_directed(a, b);
    }

    pub fn into_pdag(self) -> Pdag {
        self.0
    }
}

impl Deref for Dag {
    type Target = Pdag;

    fn deref(&self) -> &Pdag {
        &self.0
    }
}
