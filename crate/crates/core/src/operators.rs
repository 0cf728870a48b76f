//! Insert, Delete and Reverse operators on CPDAGs.
//!
//! Each operator carries the explicit parent set `E` of its target (and `F`
//! for the reversed node) so that its score delta depends only on the
//! parameters, not on the graph it was computed against. Validity against the
//! current graph is checked separately.
//!
//! Conditions, with `N = Ne(y) ∩ Ad(x)`:
//!
//! - `Insert(x, y, T, E)`: `x ∉ Ad(y)`; `T ⊆ Ne(y) \ Ad(x)`; `N ∪ T` is a
//!   clique; every semi-directed path `y ⇝ x` meets `N ∪ T`;
//!   `E = N ∪ T ∪ Pa(y)`.
//! - `Delete(x, y, C, E)`: `x → y` or `x − y` (then `x < y`); `C ⊆ N` is a
//!   clique; `E = C ∪ Pa(y)`.
//! - `Reverse(x, y, T, E, F)`: `y → x` becomes `x → y`; `T` and the clique
//!   condition as for Insert; every semi-directed path `y ⇝ x` other than the
//!   edge `y → x` meets `N ∪ T ∪ Ne(x)`; `E = N ∪ T ∪ Pa(y)`; `F = Pa(x)`.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{complete_pdag, EdgeChange, EdgeKind, PairStatus, Pdag};
use crate::nodeset::NodeSet;
use crate::scoring::Scorer;
use crate::NodeId;

/// Unordered node pairs, stored as `(min, max)`.
pub type PairSet = HashSet<(NodeId, NodeId)>;

pub fn pair(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InsertOp {
    pub x: NodeId,
    pub y: NodeId,
    pub t: NodeSet,
    pub e: NodeSet,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeleteOp {
    pub x: NodeId,
    pub y: NodeId,
    pub c: NodeSet,
    pub e: NodeSet,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReverseOp {
    pub x: NodeId,
    pub y: NodeId,
    pub t: NodeSet,
    pub e: NodeSet,
    pub f: NodeSet,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Insert(InsertOp),
    Delete(DeleteOp),
    Reverse(ReverseOp),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Delete,
    Reverse,
    Insert,
}

impl Operator {
    pub fn kind(&self) -> OpKind {
        match self {
            Operator::Insert(_) => OpKind::Insert,
            Operator::Delete(_) => OpKind::Delete,
            Operator::Reverse(_) => OpKind::Reverse,
        }
    }

    pub fn x(&self) -> NodeId {
        match self {
            Operator::Insert(op) => op.x,
            Operator::Delete(op) => op.x,
            Operator::Reverse(op) => op.x,
        }
    }

    pub fn y(&self) -> NodeId {
        match self {
            Operator::Insert(op) => op.y,
            Operator::Delete(op) => op.y,
            Operator::Reverse(op) => op.y,
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            Operator::Insert(op) => op.delta,
            Operator::Delete(op) => op.delta,
            Operator::Reverse(op) => op.delta,
        }
    }

    /// `T` for inserts and reversals, `C` for deletions.
    pub fn subset(&self) -> &NodeSet {
        match self {
            Operator::Insert(op) => &op.t,
            Operator::Delete(op) => &op.c,
            Operator::Reverse(op) => &op.t,
        }
    }

    /// Ordering used to break ties between equal deltas: kind, x, y, then
    /// the lexicographic `T`/`C` set.
    pub fn canonical_cmp(&self, other: &Operator) -> Ordering {
        (self.kind(), self.x(), self.y(), self.subset())
            .cmp(&(other.kind(), other.x(), other.y(), other.subset()))
    }

    /// Recomputes the delta from the stored parameters.
    pub fn recompute_delta(&self, scorer: &mut Scorer) -> Result<f64> {
        match self {
            Operator::Insert(op) => scorer.insert_delta(op.x, op.y, &op.e),
            Operator::Delete(op) => scorer.delete_delta(op.x, op.y, &op.e),
            Operator::Reverse(op) => scorer.reverse_delta(op.x, op.y, &op.e, &op.f),
        }
    }

    pub fn check(&self, g: &Pdag) -> Validity {
        match self {
            Operator::Insert(op) => check_insert(g, op),
            Operator::Delete(op) => check_delete(g, op),
            Operator::Reverse(op) => check_reverse(g, op),
        }
    }

    pub fn is_valid(&self, g: &Pdag) -> bool {
        self.check(g) == Validity::Valid
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(OperatorJson::from(self)).expect("operator serialization cannot fail")
    }
}

#[derive(Serialize)]
struct OperatorJson<'a> {
    kind: OpKind,
    x: NodeId,
    y: NodeId,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    t: Option<&'a NodeSet>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    c: Option<&'a NodeSet>,
    #[serde(rename = "E")]
    e: &'a NodeSet,
    #[serde(rename = "F", skip_serializing_if = "Option::is_none")]
    f: Option<&'a NodeSet>,
    delta: f64,
}

impl<'a> From<&'a Operator> for OperatorJson<'a> {
    fn from(op: &'a Operator) -> Self {
        let (t, c, e, f) = match op {
            Operator::Insert(o) => (Some(&o.t), None, &o.e, None),
            Operator::Delete(o) => (None, Some(&o.c), &o.e, None),
            Operator::Reverse(o) => (Some(&o.t), None, &o.e, Some(&o.f)),
        };
        OperatorJson {
            kind: op.kind(),
            x: op.x(),
            y: op.y(),
            t,
            c,
            e,
            f,
            delta: op.delta(),
        }
    }
}

/// Outcome of checking an operator against a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// Every condition holds except the path condition; carries an
    /// unblocked semi-directed path `y ⇝ x`.
    BlockedByPath(Vec<NodeId>),
    Invalid,
}

fn check_insert(g: &Pdag, op: &InsertOp) -> Validity {
    let (x, y) = (op.x, op.y);
    if x == y || x >= g.d() || y >= g.d() || g.is_adjacent(x, y) {
        return Validity::Invalid;
    }
    let ad_x = g.adjacent(x);
    if !op.t.is_subset(&g.neighbors(y).difference(&ad_x)) {
        return Validity::Invalid;
    }
    let s = g.neighbors(y).intersection(&ad_x).union(&op.t);
    if op.e != s.union(g.parents(y)) || !g.is_clique(&s) {
        return Validity::Invalid;
    }
    match g.find_semidirected_path(y, x, &s, None) {
        Some(path) => Validity::BlockedByPath(path),
        None => Validity::Valid,
    }
}

fn check_delete(g: &Pdag, op: &DeleteOp) -> Validity {
    let (x, y) = (op.x, op.y);
    if x == y || x >= g.d() || y >= g.d() {
        return Validity::Invalid;
    }
    let edge_ok = g.has_directed(x, y) || (g.has_undirected(x, y) && x < y);
    if !edge_ok {
        return Validity::Invalid;
    }
    let n = g.neighbors(y).intersection(&g.adjacent(x));
    if !op.c.is_subset(&n) || !g.is_clique(&op.c) || op.e != op.c.union(g.parents(y)) {
        return Validity::Invalid;
    }
    Validity::Valid
}

fn check_reverse(g: &Pdag, op: &ReverseOp) -> Validity {
    let (x, y) = (op.x, op.y);
    if x == y || x >= g.d() || y >= g.d() || !g.has_directed(y, x) {
        return Validity::Invalid;
    }
    let ad_x = g.adjacent(x);
    if !op.t.is_subset(&g.neighbors(y).difference(&ad_x)) {
        return Validity::Invalid;
    }
    let s = g.neighbors(y).intersection(&ad_x).union(&op.t);
    if op.e != s.union(g.parents(y)) || op.f != *g.parents(x) || !g.is_clique(&s) {
        return Validity::Invalid;
    }
    let blocked = s.union(g.neighbors(x));
    match g.find_semidirected_path(y, x, &blocked, Some((y, x))) {
        Some(path) => Validity::BlockedByPath(path),
        None => Validity::Valid,
    }
}

pub fn insert_valid(g: &Pdag, op: &InsertOp) -> bool {
    check_insert(g, op) == Validity::Valid
}

pub fn delete_valid(g: &Pdag, op: &DeleteOp) -> bool {
    check_delete(g, op) == Validity::Valid
}

pub fn reverse_valid(g: &Pdag, op: &ReverseOp) -> bool {
    check_reverse(g, op) == Validity::Valid
}

/// Operators found for one scope: those that are valid, and those that fail
/// only the path condition together with the offending path.
#[derive(Debug, Default)]
pub struct Enumeration {
    pub valid: Vec<Operator>,
    pub blocked: Vec<(Operator, Vec<NodeId>)>,
}

/// Walks the clique-closed subsets `T` of `cand` on top of `base`, calling
/// `visit(S, path_ok)` for each `S = base ∪ T`. `path_blocked(S)` returns the
/// open path if any; once it returns `None` it is not asked again for
/// supersets, since enlarging the blocking set cannot reopen a path.
fn walk_subsets(
    g: &Pdag,
    base: &NodeSet,
    cand: &[NodeId],
    path_of: &mut dyn FnMut(&NodeSet) -> Option<Vec<NodeId>>,
    visit: &mut dyn FnMut(&NodeSet, &NodeSet, Option<Vec<NodeId>>),
) {
    fn rec(
        g: &Pdag,
        s: &mut NodeSet,
        t: &mut NodeSet,
        cand: &[NodeId],
        start: usize,
        closed: bool,
        path_of: &mut dyn FnMut(&NodeSet) -> Option<Vec<NodeId>>,
        visit: &mut dyn FnMut(&NodeSet, &NodeSet, Option<Vec<NodeId>>),
    ) {
        let path = if closed { None } else { path_of(s) };
        let closed = path.is_none();
        visit(s, t, path);
        for i in start..cand.len() {
            let v = cand[i];
            if !s.is_subset(&g.adjacent(v)) {
                continue;
            }
            s.insert(v);
            t.insert(v);
            rec(g, s, t, cand, i + 1, closed, path_of, visit);
            s.remove(v);
            t.remove(v);
        }
    }
    if !g.is_clique(base) {
        return;
    }
    let mut s = base.clone();
    let mut t = NodeSet::new();
    rec(g, &mut s, &mut t, cand, 0, false, path_of, visit);
}

/// All insert operators `x → y` (valid or blocked only by a path).
pub fn inserts_for_pair(g: &Pdag, x: NodeId, y: NodeId, scorer: &mut Scorer, out: &mut Enumeration) {
    if x == y || g.is_adjacent(x, y) {
        return;
    }
    let ad_x = g.adjacent(x);
    let base = g.neighbors(y).intersection(&ad_x);
    let cand = g.neighbors(y).difference(&ad_x).to_vec();
    let pa_y = g.parents(y).clone();
    walk_subsets(
        g,
        &base,
        &cand,
        &mut |s| g.find_semidirected_path(y, x, s, None),
        &mut |s, t, path| {
            let e = s.union(&pa_y);
            let delta = scorer.insert_delta(x, y, &e).expect("insert parameters are well formed");
            let op = Operator::Insert(InsertOp { x, y, t: t.clone(), e, delta });
            match path {
                None => out.valid.push(op),
                Some(p) => out.blocked.push((op, p)),
            }
        },
    );
}

/// All deletions of the edge between `x` and `y`, given as `x → y` or as an
/// undirected edge with `x < y`.
pub fn deletes_for_pair(g: &Pdag, x: NodeId, y: NodeId, scorer: &mut Scorer, out: &mut Enumeration) {
    if !(g.has_directed(x, y) || (g.has_undirected(x, y) && x < y)) {
        return;
    }
    let base = g.neighbors(y).intersection(&g.adjacent(x)).to_vec();
    let pa_y = g.parents(y).clone();
    walk_subsets(g, &NodeSet::new(), &base, &mut |_| None, &mut |c, _, _| {
        let e = c.union(&pa_y);
        let delta = scorer.delete_delta(x, y, &e).expect("delete parameters are well formed");
        out.valid.push(Operator::Delete(DeleteOp { x, y, c: c.clone(), e, delta }));
    });
}

/// All reversals of the edge `y → x`.
pub fn reversals_for_pair(g: &Pdag, x: NodeId, y: NodeId, scorer: &mut Scorer, out: &mut Enumeration) {
    if !g.has_directed(y, x) {
        return;
    }
    let ad_x = g.adjacent(x);
    let base = g.neighbors(y).intersection(&ad_x);
    let cand = g.neighbors(y).difference(&ad_x).to_vec();
    let pa_y = g.parents(y).clone();
    let f = g.parents(x).clone();
    let ne_x = g.neighbors(x).clone();
    walk_subsets(
        g,
        &base,
        &cand,
        &mut |s| g.find_semidirected_path(y, x, &s.union(&ne_x), Some((y, x))),
        &mut |s, t, path| {
            let e = s.union(&pa_y);
            let delta = scorer
                .reverse_delta(x, y, &e, &f)
                .expect("reverse parameters are well formed");
            let op = Operator::Reverse(ReverseOp { x, y, t: t.clone(), e, f: f.clone(), delta });
            match path {
                None => out.valid.push(op),
                Some(p) => out.blocked.push((op, p)),
            }
        },
    );
}

/// Valid inserts with target `y`, skipping forbidden pairs.
pub fn enumerate_inserts_to(g: &Pdag, y: NodeId, scorer: &mut Scorer, forbidden: &PairSet) -> Vec<InsertOp> {
    let mut out = Enumeration::default();
    for x in 0..g.d() {
        if !forbidden.contains(&pair(x, y)) {
            inserts_for_pair(g, x, y, scorer, &mut out);
        }
    }
    out.valid
        .into_iter()
        .map(|op| match op {
            Operator::Insert(i) => i,
            _ => unreachable!(),
        })
        .collect()
}

pub fn enumerate_inserts(g: &Pdag, scorer: &mut Scorer, forbidden: &PairSet) -> Vec<InsertOp> {
    (0..g.d())
        .flat_map(|y| enumerate_inserts_to(g, y, scorer, forbidden))
        .collect()
}

/// Valid deletions of the edge between `x` and `y`, in either orientation.
pub fn enumerate_deletes_of(g: &Pdag, x: NodeId, y: NodeId, scorer: &mut Scorer) -> Vec<DeleteOp> {
    let mut out = Enumeration::default();
    deletes_for_pair(g, x, y, scorer, &mut out);
    deletes_for_pair(g, y, x, scorer, &mut out);
    out.valid
        .into_iter()
        .map(|op| match op {
            Operator::Delete(d) => d,
            _ => unreachable!(),
        })
        .collect()
}

pub fn enumerate_deletes(g: &Pdag, scorer: &mut Scorer) -> Vec<DeleteOp> {
    let mut out = Vec::new();
    for (a, b) in g.directed_edges().into_iter().chain(g.undirected_edges()) {
        out.extend(enumerate_deletes_of(g, a, b, scorer));
    }
    out
}

pub fn enumerate_reversals(g: &Pdag, scorer: &mut Scorer) -> Vec<ReverseOp> {
    let mut out = Enumeration::default();
    for (y, x) in g.directed_edges() {
        reversals_for_pair(g, x, y, scorer, &mut out);
    }
    out.valid
        .into_iter()
        .map(|op| match op {
            Operator::Reverse(r) => r,
            _ => unreachable!(),
        })
        .collect()
}

/// Applies a valid operator and completes the result into a CPDAG.
///
/// Returns the exact sequence of single-edge changes performed: first the
/// operator's own edits, then the orientation changes made by completion.
/// On error `g` is left untouched.
pub fn apply_operator(g: &mut Pdag, op: &Operator) -> Result<Vec<EdgeChange>> {
    if !op.is_valid(g) {
        return Err(Error::InvalidOperator);
    }
    let mut work = g.clone();
    let mut changes = Vec::new();
    let mut push = |work: &mut Pdag, c: EdgeChange| -> Result<()> {
        work.apply_change(c)?;
        changes.push(c);
        Ok(())
    };
    match op {
        Operator::Insert(o) => {
            push(&mut work, EdgeChange::new(o.x, o.y, EdgeKind::AddDirected))?;
            for t in &o.t {
                push(&mut work, EdgeChange::new(t, o.y, EdgeKind::Orient))?;
            }
        }
        Operator::Delete(o) => {
            let (x, y) = (o.x, o.y);
            let h = g.neighbors(y).intersection(&g.adjacent(x)).difference(&o.c);
            let kind = if g.has_directed(x, y) {
                EdgeKind::RemoveDirected
            } else {
                EdgeKind::RemoveUndirected
            };
            push(&mut work, EdgeChange::new(x, y, kind))?;
            for v in &h {
                push(&mut work, EdgeChange::new(y, v, EdgeKind::Orient))?;
                if g.has_undirected(x, v) {
                    push(&mut work, EdgeChange::new(x, v, EdgeKind::Orient))?;
                }
            }
        }
        Operator::Reverse(o) => {
            push(&mut work, EdgeChange::new(o.y, o.x, EdgeKind::Reverse))?;
            for t in &o.t {
                push(&mut work, EdgeChange::new(t, o.y, EdgeKind::Orient))?;
            }
        }
    }
    let target = complete_pdag(&work)?;
    for c in completion_diff(&work, &target)? {
        push(&mut work, c)?;
    }
    debug_assert_eq!(work, target);
    *g = work;
    Ok(changes)
}

/// Single-edge changes turning `from` into `to`, which must share a skeleton.
pub fn completion_diff(from: &Pdag, to: &Pdag) -> Result<Vec<EdgeChange>> {
    let mut out = Vec::new();
    for a in 0..from.d() {
        for b in a + 1..from.d() {
            use PairStatus::*;
            let c = match (from.status(a, b), to.status(a, b)) {
                (x, y) if x == y => continue,
                (Undirected, Forward) => EdgeChange::new(a, b, EdgeKind::Orient),
                (Undirected, Backward) => EdgeChange::new(b, a, EdgeKind::Orient),
                (Forward, Undirected) => EdgeChange::new(a, b, EdgeKind::Unorient),
                (Backward, Undirected) => EdgeChange::new(b, a, EdgeKind::Unorient),
                (Forward, Backward) => EdgeChange::new(a, b, EdgeKind::Reverse),
                (Backward, Forward) => EdgeChange::new(b, a, EdgeKind::Reverse),
                _ => return Err(Error::SkeletonChanged(a, b)),
            };
            out.push(c);
        }
    }
    Ok(out)
}
