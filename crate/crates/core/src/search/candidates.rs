//! Lazily invalidated operator heaps with incremental refresh.
//!
//! After each applied operator only the operators that could have become
//! valid are re-enumerated. The scopes come from necessary conditions on
//! `(x, y)` for each single-edge change; operators that failed only the
//! semi-directed path condition are parked together with the open path and
//! rechecked when an edge on that path changes.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::graph::{EdgeChange, EdgeKind, Pdag};
use crate::nodeset::NodeSet;
use crate::operators::{
    deletes_for_pair, inserts_for_pair, pair, reversals_for_pair, Enumeration, OpKind, Operator,
    PairSet, Validity,
};
use crate::scoring::Scorer;
use crate::NodeId;

/// Heap entry: larger delta first, then the canonically smaller operator.
#[derive(Clone, Debug)]
struct Entry(Operator);

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .delta()
            .total_cmp(&other.0.delta())
            .then_with(|| other.0.canonical_cmp(&self.0))
    }
}

/// Which operator kinds are tracked, and the strict/non-strict thresholds
/// they must pass to be stored.
#[derive(Clone, Copy, Debug)]
pub struct Policy {
    pub inserts: bool,
    pub deletes: bool,
    pub reversals: bool,
    /// Deletions with zero delta are kept when true.
    pub deletes_allow_zero: bool,
}

impl Policy {
    pub fn admits(&self, op: &Operator) -> bool {
        let d = op.delta();
        match op.kind() {
            OpKind::Insert => self.inserts && d > 0.0,
            OpKind::Reverse => self.reversals && d > 0.0,
            OpKind::Delete => self.deletes && (d > 0.0 || (self.deletes_allow_zero && d == 0.0)),
        }
    }
}

/// Identity of an operator for set membership (delta is implied by `E`/`F`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpKey(OpKind, NodeId, NodeId, NodeSet, NodeSet);

impl From<&Operator> for OpKey {
    fn from(op: &Operator) -> Self {
        let e = match op {
            Operator::Insert(o) => o.e.clone(),
            Operator::Delete(o) => o.e.clone(),
            Operator::Reverse(o) => o.e.clone(),
        };
        OpKey(op.kind(), op.x(), op.y(), op.subset().clone(), e)
    }
}

#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub policy: Policy,
    heaps: [BinaryHeap<Entry>; 3],
    blocked: Vec<Option<(Operator, Vec<NodeId>)>>,
    blocked_index: HashMap<(NodeId, NodeId), Vec<usize>>,
    /// Inserts popped while their pair was forbidden.
    suppressed: Vec<Operator>,
    pub stale_pops: u64,
}

fn slot(kind: OpKind) -> usize {
    match kind {
        OpKind::Delete => 0,
        OpKind::Reverse => 1,
        OpKind::Insert => 2,
    }
}

#[derive(Default)]
struct Scope {
    insert_to: HashSet<NodeId>,
    insert_pairs: HashSet<(NodeId, NodeId)>,
    delete_to: HashSet<NodeId>,
    delete_from: HashSet<NodeId>,
    delete_pairs: HashSet<(NodeId, NodeId)>,
    reverse_to: HashSet<NodeId>,
    reverse_from: HashSet<NodeId>,
    reverse_pairs: HashSet<(NodeId, NodeId)>,
}

impl Scope {
    /// Adds the `(x, y)` scopes in which an operator can become valid through
    /// change `c`, evaluated on graph `g`.
    fn add(&mut self, g: &Pdag, c: EdgeChange) {
        let (a, b) = (c.a, c.b);
        let ne_a = g.neighbors(a);
        let ne_b = g.neighbors(b);
        let ne_ab = ne_a.intersection(ne_b);
        let ne_b_and_b = ne_b.with(b);
        let ne_a_and_a = ne_a.with(a);
        let ad_a = g.adjacent(a);
        let ad_b = g.adjacent(b);
        use EdgeKind::*;

        // Inserts.
        match c.kind {
            AddUndirected | AddDirected => {
                if c.kind == AddUndirected {
                    self.insert_to.insert(a);
                }
                self.insert_to.insert(b);
                self.insert_to.extend(ne_ab.iter());
                self.insert_pairs.extend(ne_b.iter().map(|y| (a, y)));
                self.insert_pairs.extend(ne_a.iter().map(|y| (b, y)));
            }
            RemoveUndirected => {
                self.insert_pairs.extend(ne_b_and_b.iter().map(|y| (a, y)));
                self.insert_pairs.extend(ne_a_and_a.iter().map(|y| (b, y)));
                self.insert_pairs.extend(ad_b.iter().map(|x| (x, a)));
                self.insert_pairs.extend(ad_a.iter().map(|x| (x, b)));
            }
            Orient => {
                self.insert_pairs.extend(ad_b.iter().map(|x| (x, a)));
                self.insert_to.insert(b);
            }
            RemoveDirected => {
                self.insert_to.insert(b);
                self.insert_pairs.extend(ne_b_and_b.iter().map(|y| (a, y)));
                self.insert_pairs.extend(ne_a_and_a.iter().map(|y| (b, y)));
            }
            Unorient | Reverse => {
                self.insert_to.insert(a);
                self.insert_to.insert(b);
            }
        }

        // Deletions.
        match c.kind {
            AddUndirected | AddDirected => {
                if c.kind == AddUndirected {
                    self.delete_to.insert(a);
                }
                self.delete_to.insert(b);
                self.delete_from.insert(a);
                self.delete_from.insert(b);
                let common = ad_a.intersection(&ad_b);
                for x in &common {
                    for y in &ne_ab {
                        self.delete_pairs.insert(pair(x, y));
                    }
                }
            }
            RemoveUndirected => {}
            Orient | RemoveDirected => {
                self.delete_to.insert(b);
            }
            Unorient | Reverse => {
                self.delete_to.insert(a);
                self.delete_to.insert(b);
            }
        }

        // Reversals.
        match c.kind {
            AddUndirected | AddDirected => {
                if c.kind == AddUndirected {
                    self.reverse_to.insert(a);
                    self.reverse_from.insert(a);
                } else {
                    self.reverse_pairs.extend(ne_b.iter().map(|y| (a, y)));
                }
                self.reverse_to.insert(b);
                self.reverse_from.insert(b);
                self.reverse_to.extend(ne_ab.iter());
            }
            RemoveUndirected => {
                self.reverse_pairs.extend(ne_b_and_b.iter().map(|y| (a, y)));
                self.reverse_pairs.extend(ne_a_and_a.iter().map(|y| (b, y)));
                self.reverse_pairs.extend(ad_b.iter().map(|x| (x, a)));
                self.reverse_pairs.extend(ad_a.iter().map(|x| (x, b)));
            }
            Orient => {
                self.reverse_pairs.extend(ad_b.iter().map(|x| (x, a)));
                self.reverse_to.insert(b);
                self.reverse_from.insert(b);
            }
            RemoveDirected => {
                self.reverse_to.insert(b);
                self.reverse_pairs.extend(ne_b_and_b.iter().map(|y| (a, y)));
                self.reverse_from.insert(b);
            }
            Unorient | Reverse => {
                self.reverse_to.insert(a);
                self.reverse_to.insert(b);
                self.reverse_from.insert(a);
                self.reverse_from.insert(b);
            }
        }
    }

    fn enumerate(&self, g: &Pdag, scorer: &mut Scorer, policy: &Policy, out: &mut Enumeration) {
        let d = g.d();
        if policy.inserts {
            let mut pairs: HashSet<(NodeId, NodeId)> = self
                .insert_pairs
                .iter()
                .copied()
                .filter(|&(x, y)| !self.insert_to.contains(&y) && x != y)
                .collect();
            for &y in &self.insert_to {
                pairs.extend((0..d).filter(|&x| x != y).map(|x| (x, y)));
            }
            for (x, y) in sorted(pairs) {
                inserts_for_pair(g, x, y, scorer, out);
            }
        }
        if policy.deletes {
            let mut pairs: HashSet<(NodeId, NodeId)> = self.delete_pairs.clone();
            for &y in &self.delete_to {
                pairs.extend(g.parents(y).iter().map(|x| pair(x, y)));
                pairs.extend(g.neighbors(y).iter().map(|x| pair(x, y)));
            }
            for &x in &self.delete_from {
                pairs.extend(g.children(x).iter().map(|y| pair(x, y)));
                pairs.extend(g.neighbors(x).iter().map(|y| pair(x, y)));
            }
            for (a, b) in sorted(pairs) {
                deletes_for_pair(g, a, b, scorer, out);
                deletes_for_pair(g, b, a, scorer, out);
            }
        }
        if policy.reversals {
            // Stored as (x, y) for the edge y → x.
            let mut pairs: HashSet<(NodeId, NodeId)> = self.reverse_pairs.clone();
            for &y in &self.reverse_to {
                pairs.extend(g.children(y).iter().map(|x| (x, y)));
            }
            for &x in &self.reverse_from {
                pairs.extend(g.parents(x).iter().map(|y| (x, y)));
            }
            for (x, y) in sorted(pairs) {
                reversals_for_pair(g, x, y, scorer, out);
            }
        }
    }
}

fn sorted(set: HashSet<(NodeId, NodeId)>) -> Vec<(NodeId, NodeId)> {
    let mut v: Vec<_> = set.into_iter().collect();
    v.sort_unstable();
    v
}

impl CandidateSet {
    pub fn new(policy: Policy) -> Self {
        CandidateSet {
            policy,
            heaps: Default::default(),
            blocked: Vec::new(),
            blocked_index: HashMap::new(),
            suppressed: Vec::new(),
            stale_pops: 0,
        }
    }

    /// Discards everything and enumerates all operators of `g` from scratch.
    pub fn rebuild(&mut self, g: &Pdag, scorer: &mut Scorer) {
        let policy = self.policy;
        *self = CandidateSet {
            stale_pops: self.stale_pops,
            ..CandidateSet::new(policy)
        };
        let out = full_enumeration(g, scorer, &policy);
        self.absorb(out);
    }

    fn absorb(&mut self, out: Enumeration) {
        for op in out.valid {
            self.push(op);
        }
        for (op, path) in out.blocked {
            self.park(op, path);
        }
    }

    pub fn push(&mut self, op: Operator) {
        if self.policy.admits(&op) {
            self.heaps[slot(op.kind())].push(Entry(op));
        }
    }

    fn park(&mut self, op: Operator, path: Vec<NodeId>) {
        if !self.policy.admits(&op) {
            return;
        }
        let idx = self.blocked.len();
        for w in path.windows(2) {
            self.blocked_index.entry(pair(w[0], w[1])).or_default().push(idx);
        }
        self.blocked.push(Some((op, path)));
    }

    /// Best operator of `kind` that is valid for `g`, left in the heap.
    /// Stale entries met on the way are dropped or parked. Inserts whose
    /// pair is in `forbidden` are moved aside.
    pub fn peek_valid(&mut self, kind: OpKind, g: &Pdag, forbidden: &PairSet) -> Option<&Operator> {
        let s = slot(kind);
        loop {
            let head = self.heaps[s].peek()?;
            let op = &head.0;
            if kind == OpKind::Insert && forbidden.contains(&pair(op.x(), op.y())) {
                let Entry(op) = self.heaps[s].pop().expect("peeked");
                self.suppressed.push(op);
                continue;
            }
            match op.check(g) {
                Validity::Valid => break,
                Validity::BlockedByPath(path) => {
                    let Entry(op) = self.heaps[s].pop().expect("peeked");
                    self.stale_pops += 1;
                    self.park(op, path);
                }
                Validity::Invalid => {
                    self.heaps[s].pop();
                    self.stale_pops += 1;
                }
            }
        }
        self.heaps[s].peek().map(|e| &e.0)
    }

    pub fn pop_valid(&mut self, kind: OpKind, g: &Pdag, forbidden: &PairSet) -> Option<Operator> {
        self.peek_valid(kind, g, forbidden)?;
        self.heaps[slot(kind)].pop().map(|e| e.0)
    }

    /// Returns the inserts that were set aside for forbidden pairs.
    pub fn restore_suppressed(&mut self) {
        for op in std::mem::take(&mut self.suppressed) {
            self.push(op);
        }
    }

    /// Updates the candidates after `changes` turned `before` into `after`.
    pub fn refresh(&mut self, before: &Pdag, after: &Pdag, changes: &[EdgeChange], scorer: &mut Scorer) {
        if changes.is_empty() {
            return;
        }
        let mut scope = Scope::default();
        let mut g = before.clone();
        let mut touched = HashSet::new();
        for &c in changes {
            scope.add(&g, c);
            g.apply_change(c).expect("changes replay on the graph they came from");
            scope.add(&g, c);
            touched.insert(pair(c.a, c.b));
        }
        debug_assert_eq!(&g, after);

        let mut out = Enumeration::default();
        scope.enumerate(after, scorer, &self.policy, &mut out);
        self.absorb(out);

        let mut recheck: Vec<usize> = touched
            .iter()
            .filter_map(|p| self.blocked_index.remove(p))
            .flatten()
            .collect();
        recheck.sort_unstable();
        recheck.dedup();
        for idx in recheck {
            let Some((op, _)) = self.blocked[idx].take() else {
                continue;
            };
            match op.check(after) {
                Validity::Valid => self.push(op),
                Validity::BlockedByPath(path) => self.park(op, path),
                Validity::Invalid => {}
            }
        }
    }

    /// Keys of every operator currently held in a heap or set aside.
    pub fn held_keys(&self) -> HashSet<OpKey> {
        self.heaps
            .iter()
            .flat_map(|h| h.iter().map(|e| OpKey::from(&e.0)))
            .chain(self.suppressed.iter().map(OpKey::from))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.heaps.iter().map(BinaryHeap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parked(&self) -> usize {
        self.blocked.iter().filter(|b| b.is_some()).count()
    }
}

/// Every operator of `g` admitted by `policy`, with path-blocked ones apart.
pub fn full_enumeration(g: &Pdag, scorer: &mut Scorer, policy: &Policy) -> Enumeration {
    let d = g.d();
    let mut out = Enumeration::default();
    if policy.inserts {
        for y in 0..d {
            for x in 0..d {
                inserts_for_pair(g, x, y, scorer, &mut out);
            }
        }
    }
    if policy.deletes {
        for (a, b) in g.directed_edges().into_iter().chain(g.undirected_edges()) {
            deletes_for_pair(g, a, b, scorer, &mut out);
        }
    }
    if policy.reversals {
        for (y, x) in g.directed_edges() {
            reversals_for_pair(g, x, y, scorer, &mut out);
        }
    }
    out
}
