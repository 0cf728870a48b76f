//! Random linear-Gaussian structural equation models.
//!
//! Random numbers come from ChaCha8 seeded with `seed`; the ground truth uses
//! stream 0 and data sampling uses stream 1. Draws happen in this order:
//! skeleton (pairs `i < j` lexicographically), permutation, weight
//! magnitudes, weight signs, noise scales; then data row by row, nodes in
//! topological order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::io::GraphJson;
use crate::graph::{dag_to_cpdag, Dag, Pdag};
use crate::scoring::DataSet;
use crate::NodeId;

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub d: usize,
    /// Expected number of parents per node.
    pub rho: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub allow_negative: bool,
    pub eps_max: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(d: usize, rho: f64, seed: u64) -> Self {
        SimConfig {
            d,
            rho,
            weight_low: 1.0,
            weight_high: 3.0,
            allow_negative: false,
            eps_max: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return bad(format!("rho must be a non-negative number, got {}", self.rho));
        }
        if !(self.weight_low > 0.0 && self.weight_low <= self.weight_high && self.weight_high.is_finite()) {
            return bad(format!(
                "weight bounds must satisfy 0 < low <= high, got [{}, {}]",
                self.weight_low, self.weight_high
            ));
        }
        if !(self.eps_max >= 0.0 && self.eps_max.is_finite()) {
            return bad(format!("eps_max must be non-negative, got {}", self.eps_max));
        }
        Ok(())
    }

    /// Edge probability `2ρ/(d−1)` and whether it had to be clamped to 1.
    pub fn edge_probability(&self) -> (f64, bool) {
        if self.d <= 1 {
            return (0.0, false);
        }
        let p = 2.0 * self.rho / (self.d as f64 - 1.0);
        if p > 1.0 {
            (1.0, true)
        } else {
            (p, false)
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub dag: Dag,
    /// Per node, `(parent, weight)` sorted by parent.
    pub weights: Vec<Vec<(NodeId, f64)>>,
    pub noise: Vec<f64>,
    pub cpdag: Pdag,
    pub edge_probability: f64,
    pub probability_clamped: bool,
}

pub fn sample_ground_truth(cfg: &SimConfig) -> Result<GroundTruth> {
    cfg.validate()?;
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);
    let (p, clamped) = cfg.edge_probability();

    let mut edges = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    let mut perm: Vec<NodeId> = (0..d).collect();
    perm.shuffle(&mut rng);
    let mut dag = Dag::new(d);
    for (i, j) in edges {
        dag.add_edge(perm[i], perm[j]);
    }

    let mut weights: Vec<Vec<(NodeId, f64)>> = (0..d)
        .map(|v| {
            dag.parents(v)
                .iter()
                .map(|u| (u, rng.random_range(cfg.weight_low..=cfg.weight_high)))
                .collect()
        })
        .collect();
    if cfg.allow_negative {
        for w in weights.iter_mut().flatten() {
            if rng.random_bool(0.5) {
                w.1 = -w.1;
            }
        }
    }
    for w in &mut weights {
        let total: f64 = w.iter().map(|(_, v)| v.abs()).sum();
        for (_, v) in w.iter_mut() {
            *v /= total;
        }
    }
    let noise = (0..d).map(|_| rng.random_range(0.0..=cfg.eps_max)).collect();
    let cpdag = dag_to_cpdag(&dag);
    Ok(GroundTruth {
        dag,
        weights,
        noise,
        cpdag,
        edge_probability: p,
        probability_clamped: clamped,
    })
}

/// `n` samples by ancestral sampling: `x_i = Σ W_ij x_j + ε_i z`, `z ~ N(0, 1)`.
pub fn sample_data(gt: &GroundTruth, n: usize, seed: u64) -> Result<DataSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let d = gt.dag.d();
    let order = gt.dag.topological_order()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut values = vec![0.0; n * d];
    for row in values.chunks_mut(d.max(1)).take(n) {
        for &v in &order {
            let mean: f64 = gt.weights[v].iter().map(|&(u, w)| w * row[u]).sum();
            let z: f64 = rng.sample(StandardNormal);
            row[v] = mean + gt.noise[v] * z;
        }
    }
    DataSet::new(n, d, values)
}

impl GroundTruth {
    /// Covariance implied by the model, `A Aᵀ` with `x = A z`.
    pub fn implied_covariance(&self) -> Vec<f64> {
        let d = self.dag.d();
        let mut a = vec![0.0; d * d];
        for v in self.dag.topological_order().expect("acyclic") {
            for &(u, w) in &self.weights[v] {
                for k in 0..d {
                    a[v * d + k] += w * a[u * d + k];
                }
            }
            a[v * d + v] += self.noise[v];
        }
        let mut cov = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] = (0..d).map(|k| a[i * d + k] * a[j * d + k]).sum();
            }
        }
        cov
    }

    pub fn to_json(&self) -> TruthJson {
        TruthJson {
            d: self.dag.d(),
            dag: self.dag.directed_edges().into_iter().map(|(a, b)| [a, b]).collect(),
            weights: self
                .weights
                .iter()
                .enumerate()
                .flat_map(|(v, ws)| ws.iter().map(move |&(u, w)| (u, v, w)))
                .collect(),
            noise: self.noise.clone(),
            cpdag: GraphJson::from(&self.cpdag),
            edge_probability: self.edge_probability,
            probability_clamped: self.probability_clamped,
        }
    }
}

/// On-disk ground truth. Weights are `(parent, child, weight)` triples.
#[derive(Debug, Serialize, Deserialize)]
pub struct TruthJson {
    pub d: usize,
    pub dag: Vec<[NodeId; 2]>,
    pub weights: Vec<(NodeId, NodeId, f64)>,
    pub noise: Vec<f64>,
    pub cpdag: GraphJson,
    pub edge_probability: f64,
    pub probability_clamped: bool,
}

impl TruthJson {
    pub fn dag(&self) -> Result<Dag> {
        let edges: Vec<_> = self.dag.iter().map(|e| (e[0], e[1])).collect();
        Dag::from_edges(self.d, &edges)
    }
}
