//! Gaussian BIC scoring of linear structural models.
//!
//! The local score of node `j` with parent set `P` is
//!
//! ```text
//! s(j, P) = -(n/2) (1 + ln 2π + ln σ̂²) - (α/2) ln(n) |P|
//! ```
//!
//! where σ̂² is the maximum-likelihood residual variance of regressing `j` on
//! `P` with an intercept, computed from the sample covariance (divisor `n`).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::nodeset::NodeSet;
use crate::NodeId;

/// `n × d` sample matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSet {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataSet {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch(values.len(), n * d));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value at row {}, column {}",
                pos / d.max(1),
                pos % d.max(1)
            )));
        }
        Ok(DataSet { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::Parse(format!("row {bad} has {} columns, expected {d}", rows[bad].len())));
        }
        Self::new(rows.len(), d, rows.concat())
    }

    /// Reads a CSV file with one sample per row. A first row that does not
    /// parse as numbers is treated as a header.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(file)
    }

    pub fn from_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {}: {e}", i + 1))),
            }
        }
        if rows.is_empty() {
            return Err(Error::Parse("no data rows".into()));
        }
        Self::from_rows(&rows)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record((0..self.d).map(|j| format!("X{j}")))?;
        for i in 0..self.n {
            w.write_record(self.row(i).iter().map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    /// Sample covariance with divisor `n`, computed in two passes.
    pub fn covariance(&self) -> Vec<f64> {
        let (n, d) = (self.n, self.d);
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut cov = vec![0.0; d * d];
        let mut centered = vec![0.0; d];
        for i in 0..n {
            for ((c, v), m) in centered.iter_mut().zip(self.row(i)).zip(&mean) {
                *c = v - m;
            }
            for a in 0..d {
                let ca = centered[a];
                for b in a..d {
                    cov[a * d + b] += ca * centered[b];
                }
            }
        }
        for a in 0..d {
            for b in a..d {
                let v = cov[a * d + b] / n as f64;
                cov[a * d + b] = v;
                cov[b * d + a] = v;
            }
        }
        cov
    }
}

/// BIC scorer with a memo of local scores.
///
/// `evaluations` counts cache misses (actual regressions), `requests` counts
/// every call to [`Scorer::local_score`].
#[derive(Clone, Debug)]
pub struct Scorer {
    d: usize,
    n: usize,
    alpha: f64,
    cov: Arc<Vec<f64>>,
    cache: HashMap<(NodeId, NodeSet), f64>,
    use_cache: bool,
    evaluations: u64,
    requests: u64,
}

impl Scorer {
    pub fn new(data: &DataSet, alpha: f64) -> Result<Self> {
        if data.n() < 2 {
            return Err(Error::InvalidArgument("at least two samples are required".into()));
        }
        Self::from_covariance(data.d(), data.n(), data.covariance(), alpha)
    }

    pub fn from_covariance(d: usize, n: usize, cov: Vec<f64>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        if cov.len() != d * d {
            return Err(Error::DimensionMismatch(cov.len(), d * d));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite covariance".into()));
        }
        Ok(Scorer {
            d,
            n,
            alpha,
            cov: Arc::new(cov),
            cache: HashMap::new(),
            use_cache: true,
            evaluations: 0,
            requests: 0,
        })
    }

    /// A fresh scorer over the same statistics, with empty cache and counters.
    pub fn fresh(&self) -> Self {
        Scorer {
            d: self.d,
            n: self.n,
            alpha: self.alpha,
            cov: Arc::clone(&self.cov),
            cache: HashMap::new(),
            use_cache: self.use_cache,
            evaluations: 0,
            requests: 0,
        }
    }

    /// Disables memoization so that every request is evaluated.
    pub fn without_cache(mut self) -> Self {
        self.use_cache = false;
        self.cache.clear();
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cov(&self, a: NodeId, b: NodeId) -> f64 {
        self.cov[a * self.d + b]
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn requests(&self) -> u64 {
        self.requests
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    pub fn local_score(&mut self, j: NodeId, parents: &NodeSet) -> f64 {
        debug_assert!(!parents.contains(j));
        self.requests += 1;
        if self.use_cache {
            if let Some(&s) = self.cache.get(&(j, parents.clone())) {
                return s;
            }
        }
        self.evaluations += 1;
        let s = self.compute_local_score(j, parents);
        if self.use_cache {
            self.cache.insert((j, parents.clone()), s);
        }
        s
    }

    /// Local score without touching the cache or the counters.
    pub fn compute_local_score(&self, j: NodeId, parents: &NodeSet) -> f64 {
        let Some(var) = self.residual_variance(j, parents) else {
            return f64::NEG_INFINITY;
        };
        let n = self.n as f64;
        -0.5 * n * (1.0 + (2.0 * PI).ln() + var.ln())
            - 0.5 * self.alpha * n.ln() * parents.len() as f64
    }

    /// σ̂² of `j` given `parents`, clamped away from zero; `None` when the
    /// parent covariance stays singular after jitter.
    pub fn residual_variance(&self, j: NodeId, parents: &NodeSet) -> Option<f64> {
        let p = parents.to_vec();
        let k = p.len();
        let cjj = self.cov(j, j);
        let floor = (1e-12 * cjj).max(f64::MIN_POSITIVE);
        if k == 0 {
            return Some(cjj.max(floor));
        }
        let mut a = vec![0.0; k * k];
        for (r, &pr) in p.iter().enumerate() {
            for (c, &pc) in p.iter().enumerate() {
                a[r * k + c] = self.cov(pr, pc);
            }
        }
        let l = match cholesky(&a, k) {
            Some(l) => l,
            None => {
                let jitter = 1e-10 * (0..k).map(|i| a[i * k + i]).sum::<f64>() / k as f64;
                for i in 0..k {
                    a[i * k + i] += jitter;
                }
                cholesky(&a, k)?
            }
        };
        // Forward-solve L z = c; then c' A⁻¹ c = |z|².
        let mut z = vec![0.0; k];
        for r in 0..k {
            let mut s = self.cov(p[r], j);
            for c in 0..r {
                s -= l[r * k + c] * z[c];
            }
            z[r] = s / l[r * k + r];
        }
        let explained: f64 = z.iter().map(|v| v * v).sum();
        let var = cjj - explained;
        if var.is_nan() {
            return None;
        }
        Some(var.max(floor))
    }

    pub fn insert_delta(&mut self, x: NodeId, y: NodeId, e: &NodeSet) -> Result<f64> {
        if x == y || e.contains(x) || e.contains(y) {
            return Err(Error::InvalidArgument(format!("insert_delta({x}, {y}, {e:?})")));
        }
        let with = self.local_score(y, &e.with(x));
        let without = self.local_score(y, e);
        Ok(finite_or_neg_inf(with - without))
    }

    pub fn delete_delta(&mut self, x: NodeId, y: NodeId, e: &NodeSet) -> Result<f64> {
        if x == y || e.contains(y) {
            return Err(Error::InvalidArgument(format!("delete_delta({x}, {y}, {e:?})")));
        }
        let without = self.local_score(y, &e.without(x));
        let with = self.local_score(y, &e.with(x));
        Ok(finite_or_neg_inf(without - with))
    }

    pub fn reverse_delta(
        &mut self,
        x: NodeId,
        y: NodeId,
        e: &NodeSet,
        f: &NodeSet,
    ) -> Result<f64> {
        if !f.contains(y) || f.contains(x) {
            return Err(Error::InvalidArgument(format!("reverse_delta({x}, {y}, {e:?}, {f:?})")));
        }
        let ins = self.insert_delta(x, y, e)?;
        let f_without = self.local_score(x, &f.without(y));
        let f_with = self.local_score(x, f);
        Ok(finite_or_neg_inf(ins + f_without - f_with))
    }

    pub fn total_dag_score(&mut self, g: &Dag) -> f64 {
        (0..g.d()).map(|j| self.local_score(j, g.parents(j))).sum()
    }

    pub fn empty_graph_score(&mut self) -> f64 {
        (0..self.d).map(|j| self.local_score(j, &NodeSet::new())).sum()
    }
}

fn finite_or_neg_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Lower-triangular Cholesky factor of a `k × k` row-major matrix.
fn cholesky(a: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for m in 0..j {
                s -= l[i * k + m] * l[j * k + m];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    Some(l)
}
