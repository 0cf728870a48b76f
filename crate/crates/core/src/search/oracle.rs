//! Exhaustive search over all DAGs, for small `d` only.

use crate::error::{Error, Result};
use crate::graph::{dag_to_cpdag, Dag, Pdag};
use crate::scoring::Scorer;

pub const MAX_ORACLE_NODES: usize = 5;

/// Every DAG on `d` nodes, in a fixed order: each unordered pair takes one of
/// the states none / `i → j` / `j → i`, and cyclic assignments are skipped.
pub fn all_dags(d: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut g = Pdag::new(d);
        for &(i, j) in &pairs {
            match c % 3 {
                1 => g.add_directed(i, j),
                2 => g.add_directed(j, i),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(dag) = Dag::from_pdag(g) {
            out.push(dag);
        }
    }
    out
}

/// Highest-scoring equivalence class over all DAGs on `scorer.d()` nodes.
/// Among equal scores the first DAG in enumeration order wins.
pub fn exhaustive_oracle(scorer: &mut Scorer) -> Result<(Pdag, f64)> {
    let d = scorer.d();
    if d > MAX_ORACLE_NODES {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search supports at most {MAX_ORACLE_NODES} nodes, got {d}"
        )));
    }
    let mut best: Option<(Dag, f64)> = None;
    for dag in all_dags(d) {
        let s = scorer.total_dag_score(&dag);
        if best.as_ref().map_or(true, |(_, b)| s > *b) {
            best = Some((dag, s));
        }
    }
    let (dag, score) = best.expect("the empty graph is always enumerated");
    Ok((dag_to_cpdag(&dag), score))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dag_counts() {
        let counts: Vec<usize> = (0..=4).map(|d| all_dags(d).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 25, 543]);
    }

    #[test]
    fn rejects_large_d() {
        let mut sc = Scorer::from_covariance(6, 10, identity(6), 2.0).unwrap();
        assert!(exhaustive_oracle(&mut sc).is_err());
    }

    #[test]
    fn single_node() {
        let mut sc = Scorer::from_covariance(1, 10, identity(1), 2.0).unwrap();
        let (g, _) = exhaustive_oracle(&mut sc).unwrap();
        assert_eq!(g, Pdag::new(1));
    }

    fn identity(d: usize) -> Vec<f64> {
        (0..d * d).map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 }).collect()
    }
}
