mod common;

use common::*;
use rand::Rng;
use rand_distr::StandardNormal;
use xges::{DataSet, NodeSet, Scorer};

/// Least-squares residual variance by Gram–Schmidt on the raw columns,
/// independent of the scorer's covariance/Cholesky path.
fn ols_residual_variance(data: &DataSet, j: usize, parents: &[usize]) -> f64 {
    let n = data.n();
    let center = |k: usize| -> Vec<f64> {
        let col: Vec<f64> = (0..n).map(|i| data.get(i, k)).collect();
        let m = col.iter().sum::<f64>() / n as f64;
        col.into_iter().map(|v| v - m).collect()
    };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &p in parents {
        let mut v = center(p);
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        basis.push(v);
    }
    let mut y = center(j);
    for b in &basis {
        let c: f64 = y.iter().zip(b).map(|(a, b)| a * b).sum();
        y.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
    }
    y.iter().map(|a| a * a).sum::<f64>() / n as f64
}

fn bic(n: usize, var: f64, k: usize, alpha: f64) -> f64 {
    let n = n as f64;
    -0.5 * n * (1.0 + (2.0 * std::f64::consts::PI).ln() + var.ln()) - 0.5 * alpha * n.ln() * k as f64
}

#[test]
fn local_score_matches_independent_ols() {
    let gt = xges::simulate::sample_ground_truth(&xges::simulate::SimConfig::new(6, 1.5, 9)).unwrap();
    let data = xges::simulate::sample_data(&gt, 2_000, 9).unwrap();
    let mut sc = Scorer::new(&data, 2.0).unwrap();
    let mut r = rng(1);
    for _ in 0..200 {
        let j = r.random_range(0..6);
        let parents: Vec<usize> = (0..6).filter(|&k| k != j && r.random_bool(0.4)).collect();
        let var = ols_residual_variance(&data, j, &parents);
        let want = bic(2_000, var, parents.len(), 2.0);
        let got = sc.local_score(j, &parents.iter().copied().collect());
        assert!((got - want).abs() <= 1e-8 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

#[test]
fn score_equivalence_within_classes() {
    let (mut sc, _) = simulated_scorer(5, 2.0, 3_000, 4, 2.0);
    let mut r = rng(4);
    for _ in 0..30 {
        let c = random_cpdag(5, 0.5, &mut r);
        let scores: Vec<f64> = members_of(&c).iter().map(|m| sc.total_dag_score(&to_dag(m))).collect();
        for s in &scores {
            assert!((s - scores[0]).abs() <= 1e-9 * (1.0 + scores[0].abs()));
        }
    }
}

#[test]
fn chain_and_reversed_chain_score_equally() {
    let (mut sc, _) = simulated_scorer(3, 1.0, 1_000, 0, 2.0);
    let a = xges::Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let b = xges::Dag::from_edges(3, &[(2, 1), (1, 0)]).unwrap();
    let (sa, sb) = (sc.total_dag_score(&a), sc.total_dag_score(&b));
    assert!((sa - sb).abs() <= 1e-9 * (1.0 + sa.abs()));
}

#[test]
fn local_consistency() {
    let d = 5;
    let mut agree = 0;
    let probes = 100;
    let mut r = rng(7);
    for probe in 0..probes {
        let (mut sc, gt) = simulated_scorer(d, 1.0, 100_000, 1_000 + probe, 2.0);
        let y = r.random_range(0..d);
        let x = (y + r.random_range(1..d)) % d;
        let pa: NodeSet = gt.dag.parents(y).clone();
        // x is a parent, a descendant, or a non-descendant independent of y
        // given the rest of Pa(y).
        let dependent = pa.contains(x) || descendants(&gt.dag, y).contains(&x);
        let delta = sc.insert_delta(x, y, &pa.without(x)).unwrap();
        if (delta > 0.0) == dependent {
            agree += 1;
        }
    }
    assert!(agree as f64 >= 0.95 * probes as f64, "{agree}/{probes}");
}

fn descendants(g: &xges::Dag, v: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for c in g.children(u).iter() {
            if !out.contains(&c) {
                out.push(c);
                stack.push(c);
            }
        }
    }
    out
}

#[test]
fn insert_delta_sign() {
    let mut r = rng(12);
    let n = 10_000;
    let indep: Vec<Vec<f64>> = (0..n).map(|_| vec![r.sample(StandardNormal), r.sample(StandardNormal)]).collect();
    let mut sc = Scorer::new(&DataSet::from_rows(&indep).unwrap(), 2.0).unwrap();
    assert!(sc.insert_delta(0, 1, &NodeSet::new()).unwrap() < 0.0);

    let dep: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let x: f64 = r.sample(StandardNormal);
            let e: f64 = r.sample(StandardNormal);
            vec![x, x + 0.1 * e]
        })
        .collect();
    let mut sc = Scorer::new(&DataSet::from_rows(&dep).unwrap(), 2.0).unwrap();
    assert!(sc.insert_delta(0, 1, &NodeSet::new()).unwrap() > 0.0);
}

#[test]
fn cache_is_transparent() {
    let (mut cached, _) = simulated_scorer(6, 2.0, 1_000, 2, 2.0);
    let mut uncached = cached.fresh().without_cache();
    let mut r = rng(2);
    for _ in 0..500 {
        let j = r.random_range(0..6);
        let p: NodeSet = (0..6).filter(|&k| k != j && r.random_bool(0.5)).collect();
        assert_eq!(cached.local_score(j, &p).to_bits(), uncached.local_score(j, &p).to_bits());
    }
    assert!(cached.evaluations() < uncached.evaluations());
    assert_eq!(cached.requests(), uncached.requests());
}

#[test]
fn true_dag_outscores_empty_graph_with_enough_data() {
    let (mut sc, gt) = simulated_scorer(8, 1.5, 10_000, 5, 2.0);
    if gt.dag.num_edges() > 0 {
        assert!(sc.total_dag_score(&gt.dag) > sc.empty_graph_score());
    }
}
