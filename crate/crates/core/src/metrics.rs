//! Comparison of a learned CPDAG with the ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{consistent_extension, Dag, Pdag};
use crate::scoring::Scorer;

/// Structural Hamming distance: unordered pairs whose status (none,
/// undirected, or either orientation) differs.
pub fn shd(p: &Pdag, q: &Pdag) -> Result<usize> {
    if p.d() != q.d() {
        return Err(Error::DimensionMismatch(p.d(), q.d()));
    }
    let d = p.d();
    Ok((0..d)
        .flat_map(|a| (a + 1..d).map(move |b| (a, b)))
        .filter(|&(a, b)| p.status(a, b) != q.status(a, b))
        .count())
}

/// An ordered pair `(i, j)` is contained in `g` if `i → j` or `i − j`.
fn contains(g: &Pdag, i: usize, j: usize) -> bool {
    g.has_directed(i, j) || g.has_undirected(i, j)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Both graphs were empty; all three scores are reported as 1.
    pub both_empty: bool,
}

/// Precision, recall and F1 over ordered pairs.
pub fn edge_classification(pred: &Pdag, truth: &Pdag) -> Result<Classification> {
    if pred.d() != truth.d() {
        return Err(Error::DimensionMismatch(pred.d(), truth.d()));
    }
    let d = pred.d();
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            match (contains(pred, i, j), contains(truth, i, j)) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    if tp + fp == 0 && fn_ == 0 {
        return Ok(Classification { precision: 1.0, recall: 1.0, f1: 1.0, both_empty: true });
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Classification { precision, recall, f1, both_empty: false })
}

/// `(S(pred) − S(truth)) / d`, scoring `pred` through a consistent extension.
pub fn delta_s(scorer: &mut Scorer, pred: &Pdag, truth: &Dag) -> Result<f64> {
    if pred.d() != truth.d() {
        return Err(Error::DimensionMismatch(pred.d(), truth.d()));
    }
    let ext = consistent_extension(pred)?;
    let diff = scorer.total_dag_score(&ext) - scorer.total_dag_score(truth);
    Ok(diff / pred.d().max(1) as f64)
}

/// Skeleton edges of `pred` over skeleton edges of `truth`.
pub fn edge_ratio(pred: &Pdag, truth: &Pdag) -> Result<f64> {
    let t = truth.num_edges();
    if t == 0 {
        return Err(Error::InvalidArgument("edge ratio is undefined for an empty truth".into()));
    }
    Ok(pred.num_edges() as f64 / t as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub shd: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub delta_s: f64,
    pub zeta: Option<f64>,
    pub predicted_edges: usize,
    pub true_edges: usize,
}

pub fn evaluate(scorer: &mut Scorer, pred: &Pdag, truth: &Dag) -> Result<EvalReport> {
    let truth_cpdag = crate::graph::dag_to_cpdag(truth);
    let cls = edge_classification(pred, &truth_cpdag)?;
    Ok(EvalReport {
        shd: shd(pred, &truth_cpdag)?,
        precision: cls.precision,
        recall: cls.recall,
        f1: cls.f1,
        delta_s: delta_s(scorer, pred, truth)?,
        zeta: edge_ratio(pred, &truth_cpdag).ok(),
        predicted_edges: pred.num_edges(),
        true_edges: truth.num_edges(),
    })
}
