//! Greedy searches over equivalence classes: GES (with optional reversal
//! phase and the OPS variant), XGES-0 and XGES.

pub mod candidates;
pub mod oracle;

use std::time::Instant;

use serde::Serialize;

use crate::graph::{consistent_extension, Pdag};
use crate::operators::{apply_operator, enumerate_deletes, pair, OpKind, Operator, PairSet};
use crate::scoring::Scorer;
use candidates::{full_enumeration, CandidateSet, OpKey, Policy};

pub use oracle::exhaustive_oracle;

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// After every step, compare the candidates against a full enumeration.
    pub verify_candidates: bool,
    /// Record one JSON object per applied operator.
    pub trace: bool,
    /// Re-enumerate every operator after each step instead of refreshing.
    pub naive: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub inserts: u64,
    pub deletes: u64,
    pub reversals: u64,
    pub score_evaluations: u64,
    pub score_requests: u64,
    pub stale_pops: u64,
    pub runtime_ms: f64,
    /// Only filled when `verify_candidates` is set.
    pub superset_checks: u64,
    pub superset_violations: u64,
    /// Deletions tried by XGES on a copy of the state.
    pub xges_trials: u64,
    pub xges_accepted: u64,
}

impl SearchStats {
    pub fn operators_applied(&self) -> u64 {
        self.inserts + self.deletes + self.reversals
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub cpdag: Pdag,
    pub score: f64,
    pub stats: SearchStats,
    pub trace: Vec<serde_json::Value>,
}

#[derive(Clone)]
struct SearchState {
    graph: Pdag,
    score: f64,
    candidates: CandidateSet,
    forbidden: PairSet,
    stats: SearchStats,
    trace: Vec<serde_json::Value>,
}

const XGES0_POLICY: Policy = Policy { inserts: true, deletes: true, reversals: true, deletes_allow_zero: true };

struct Searcher<'a> {
    scorer: &'a mut Scorer,
    options: SearchOptions,
    /// Private scorer for verification so that the counters stay honest.
    checker: Option<Scorer>,
}

impl<'a> Searcher<'a> {
    fn new(scorer: &'a mut Scorer, options: SearchOptions) -> Self {
        let checker = options.verify_candidates.then(|| scorer.fresh());
        Searcher { scorer, options, checker }
    }

    fn start(&mut self, init: Pdag, policy: Policy, forbidden: PairSet) -> SearchState {
        let score = match consistent_extension(&init) {
            Ok(dag) => self.scorer.total_dag_score(&dag),
            Err(_) => f64::NEG_INFINITY,
        };
        let mut candidates = CandidateSet::new(policy);
        candidates.rebuild(&init, self.scorer);
        SearchState {
            graph: init,
            score,
            candidates,
            forbidden,
            stats: SearchStats::default(),
            trace: Vec::new(),
        }
    }

    fn set_policy(&mut self, st: &mut SearchState, policy: Policy) {
        st.candidates.policy = policy;
        st.candidates.rebuild(&st.graph, self.scorer);
    }

    fn apply(&mut self, st: &mut SearchState, op: &Operator) {
        let before = st.graph.clone();
        let changes = apply_operator(&mut st.graph, op).expect("popped operators are valid");
        st.score += op.delta();
        match op.kind() {
            OpKind::Insert => st.stats.inserts += 1,
            OpKind::Delete => st.stats.deletes += 1,
            OpKind::Reverse => st.stats.reversals += 1,
        }
        if self.options.naive {
            st.candidates.rebuild(&st.graph, self.scorer);
        } else {
            st.candidates.refresh(&before, &st.graph, &changes, self.scorer);
        }
        if self.options.trace {
            let mut v = op.to_json();
            v["step"] = st.stats.operators_applied().into();
            v["total_score"] = st.score.into();
            st.trace.push(v);
        }
        if let Some(checker) = self.checker.as_mut() {
            let held = st.candidates.held_keys();
            let full = full_enumeration(&st.graph, checker, &st.candidates.policy);
            st.stats.superset_checks += 1;
            st.stats.superset_violations += full
                .valid
                .iter()
                .filter(|o| st.candidates.policy.admits(o))
                .filter(|o| !held.contains(&OpKey::from(*o)))
                .count() as u64;
        }
    }

    /// The XGES-0 loop: best deletion if any is non-negative, else best
    /// improving reversal, else best improving insertion.
    fn run_xges0(&mut self, st: &mut SearchState) {
        loop {
            let op = [OpKind::Delete, OpKind::Reverse, OpKind::Insert]
                .into_iter()
                .find_map(|k| st.candidates.pop_valid(k, &st.graph, &st.forbidden));
            match op {
                Some(op) => self.apply(st, &op),
                None => break,
            }
        }
    }

    /// Applies operators of the enabled kinds, best delta first, until none
    /// is left. With several kinds enabled they compete on raw delta.
    fn run_greedy(&mut self, st: &mut SearchState, kinds: &[OpKind]) {
        loop {
            let mut best: Option<(OpKind, f64)> = None;
            for &k in kinds {
                if let Some(op) = st.candidates.peek_valid(k, &st.graph, &st.forbidden) {
                    if best.map_or(true, |(_, d)| op.delta() > d) {
                        best = Some((k, op.delta()));
                    }
                }
            }
            let Some((k, _)) = best else { break };
            let op = st
                .candidates
                .pop_valid(k, &st.graph, &st.forbidden)
                .expect("head was valid");
            self.apply(st, &op);
        }
    }

    fn finish(&mut self, mut st: SearchState, started: Instant, evals0: u64, reqs0: u64) -> SearchResult {
        st.stats.score_evaluations = self.scorer.evaluations() - evals0;
        st.stats.score_requests = self.scorer.requests() - reqs0;
        st.stats.stale_pops = st.candidates.stale_pops;
        st.stats.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
        if cfg!(debug_assertions) {
            let dag = consistent_extension(&st.graph).expect("search graphs are CPDAGs");
            let check = self.scorer.fresh().total_dag_score(&dag);
            debug_assert!(
                (check - st.score).abs() <= 1e-6 * (1.0 + check.abs()),
                "score bookkeeping drifted: {} vs {}",
                st.score,
                check
            );
        }
        SearchResult {
            cpdag: st.graph,
            score: st.score,
            stats: st.stats,
            trace: st.trace,
        }
    }
}

/// XGES-0 from `init`, never inserting an edge between a forbidden pair.
pub fn xges0(scorer: &mut Scorer, init: &Pdag, forbidden: &PairSet, options: SearchOptions) -> SearchResult {
    let started = Instant::now();
    let (e0, r0) = (scorer.evaluations(), scorer.requests());
    let mut s = Searcher::new(scorer, options);
    let mut st = s.start(init.clone(), XGES0_POLICY, forbidden.clone());
    s.run_xges0(&mut st);
    s.finish(st, started, e0, r0)
}

/// XGES: XGES-0 from the empty graph, then repeatedly try each deletion of
/// the current class (best delta first), resume XGES-0 on the copy without
/// reinserting the deleted pair, and keep the copy if it scores higher.
pub fn xges(scorer: &mut Scorer, options: SearchOptions) -> SearchResult {
    let started = Instant::now();
    let (e0, r0) = (scorer.evaluations(), scorer.requests());
    let d = scorer.d();
    let mut s = Searcher::new(scorer, options);
    let mut st = s.start(Pdag::new(d), XGES0_POLICY, PairSet::new());
    s.run_xges0(&mut st);

    'outer: loop {
        let mut deletes: Vec<Operator> = enumerate_deletes(&st.graph, s.scorer)
            .into_iter()
            .map(Operator::Delete)
            .collect();
        deletes.sort_by(|a, b| b.delta().total_cmp(&a.delta()).then_with(|| a.canonical_cmp(b)));
        for op in deletes {
            st.stats.xges_trials += 1;
            let mut trial = st.clone();
            trial.forbidden = [pair(op.x(), op.y())].into_iter().collect();
            s.apply(&mut trial, &op);
            s.run_xges0(&mut trial);
            if trial.score > st.score + 1e-9 * (1.0 + st.score.abs()) {
                trial.forbidden.clear();
                trial.candidates.restore_suppressed();
                trial.stats.xges_accepted += 1;
                st = trial;
                continue 'outer;
            }
            // Counters of rejected trials still count as work done.
            st.stats.superset_checks = trial.stats.superset_checks;
            st.stats.superset_violations = trial.stats.superset_violations;
        }
        break;
    }
    s.finish(st, started, e0, r0)
}

/// GES: forward phase of insertions, backward phase of deletions, and an
/// optional final phase of reversals. With `simultaneous_ops` insertions and
/// deletions compete in a single phase.
pub fn ges(
    scorer: &mut Scorer,
    reversal_phase: bool,
    simultaneous_ops: bool,
    options: SearchOptions,
) -> SearchResult {
    let started = Instant::now();
    let (e0, r0) = (scorer.evaluations(), scorer.requests());
    let d = scorer.d();
    let mut s = Searcher::new(scorer, options);
    let only = |inserts, deletes, reversals| Policy { inserts, deletes, reversals, deletes_allow_zero: false };
    let none = PairSet::new();
    let first = if simultaneous_ops { only(true, true, false) } else { only(true, false, false) };
    let mut st = s.start(Pdag::new(d), first, none);
    if simultaneous_ops {
        s.run_greedy(&mut st, &[OpKind::Insert, OpKind::Delete]);
    } else {
        s.run_greedy(&mut st, &[OpKind::Insert]);
        s.set_policy(&mut st, only(false, true, false));
        s.run_greedy(&mut st, &[OpKind::Delete]);
    }
    if reversal_phase {
        s.set_policy(&mut st, only(false, false, true));
        s.run_greedy(&mut st, &[OpKind::Reverse]);
    }
    s.finish(st, started, e0, r0)
}
