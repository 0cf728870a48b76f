//! Brute-force reference implementations shared by the integration tests.
//! They work on plain adjacency matrices and avoid the library's graph code
//! wherever possible.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xges::graph::{dag_to_cpdag, Dag, Pdag};
use xges::simulate::{sample_data, sample_ground_truth, SimConfig};
use xges::Scorer;

/// `m[i][j]` is true for an edge `i → j`.
pub type Adj = Vec<Vec<bool>>;

fn acyclic(m: &Adj) -> bool {
    let d = m.len();
    // 0 = unseen, 1 = on stack, 2 = done
    fn visit(u: usize, m: &Adj, state: &mut [u8]) -> bool {
        state[u] = 1;
        for v in 0..m.len() {
            if m[u][v] {
                if state[v] == 1 || (state[v] == 0 && !visit(v, m, state)) {
                    return false;
                }
            }
        }
        state[u] = 2;
        true
    }
    let mut state = vec![0u8; d];
    (0..d).all(|u| state[u] != 0 || visit(u, m, &mut state))
}

/// All DAGs on `d` labelled nodes as adjacency matrices.
pub fn all_dag_matrices(d: usize) -> Vec<Adj> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut m = vec![vec![false; d]; d];
    fn rec(k: usize, pairs: &[(usize, usize)], m: &mut Adj, out: &mut Vec<Adj>) {
        if k == pairs.len() {
            if acyclic(m) {
                out.push(m.clone());
            }
            return;
        }
        let (i, j) = pairs[k];
        rec(k + 1, pairs, m, out);
        m[i][j] = true;
        rec(k + 1, pairs, m, out);
        m[i][j] = false;
        m[j][i] = true;
        rec(k + 1, pairs, m, out);
        m[j][i] = false;
    }
    rec(0, &pairs, &mut m, &mut out);
    out
}

pub fn to_dag(m: &Adj) -> Dag {
    let d = m.len();
    let edges: Vec<_> = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| m[i][j]).map(move |j| (i, j)))
        .collect();
    Dag::from_edges(d, &edges).unwrap()
}

pub fn from_dag(g: &Pdag) -> Adj {
    let d = g.d();
    let mut m = vec![vec![false; d]; d];
    for (a, b) in g.directed_edges() {
        m[a][b] = true;
    }
    m
}

pub fn skeleton(m: &Adj) -> BTreeSet<(usize, usize)> {
    let d = m.len();
    let mut s = BTreeSet::new();
    for i in 0..d {
        for j in 0..d {
            if m[i][j] {
                s.insert((i.min(j), i.max(j)));
            }
        }
    }
    s
}

pub fn v_structures(m: &Adj) -> BTreeSet<(usize, usize, usize)> {
    let d = m.len();
    let mut s = BTreeSet::new();
    for y in 0..d {
        for x in 0..d {
            for z in x + 1..d {
                if m[x][y] && m[z][y] && !m[x][z] && !m[z][x] {
                    s.insert((x, y, z));
                }
            }
        }
    }
    s
}

pub type MecKey = (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize, usize)>);

pub fn mec_key(m: &Adj) -> MecKey {
    (skeleton(m), v_structures(m))
}

/// DAGs grouped into equivalence classes by skeleton and v-structures.
pub fn mecs(d: usize) -> BTreeMap<MecKey, Vec<Adj>> {
    let mut out: BTreeMap<MecKey, Vec<Adj>> = BTreeMap::new();
    for m in all_dag_matrices(d) {
        out.entry(mec_key(&m)).or_default().push(m);
    }
    out
}

/// CPDAG of a class from its members: an edge is directed iff every member
/// orients it the same way.
pub fn brute_cpdag(members: &[Adj]) -> Pdag {
    let d = members[0].len();
    let mut g = Pdag::new(d);
    for (i, j) in skeleton(&members[0]) {
        let fwd = members.iter().filter(|m| m[i][j]).count();
        if fwd == members.len() {
            g.add_directed(i, j);
        } else if fwd == 0 {
            g.add_directed(j, i);
        } else {
            g.add_undirected(i, j);
        }
    }
    g
}

/// Index from brute-force CPDAG to its member DAGs, for all classes on `d` nodes.
pub fn cpdag_index(d: usize) -> BTreeMap<String, (Pdag, Vec<Adj>)> {
    mecs(d)
        .into_values()
        .map(|members| {
            let c = brute_cpdag(&members);
            (xges::graph::io::to_text(&c), (c, members))
        })
        .collect()
}

/// Every simple semi-directed path `from ⇝ to` whose interior avoids `blocked`.
pub fn all_semidirected_paths(
    g: &Pdag,
    from: usize,
    to: usize,
    blocked: &BTreeSet<usize>,
    ignored: Option<(usize, usize)>,
) -> Vec<Vec<usize>> {
    fn rec(
        g: &Pdag,
        path: &mut Vec<usize>,
        to: usize,
        blocked: &BTreeSet<usize>,
        ignored: Option<(usize, usize)>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *path.last().unwrap();
        for v in 0..g.d() {
            let step = g.has_directed(u, v) || g.has_undirected(u, v);
            if !step || path.contains(&v) || ignored == Some((u, v)) {
                continue;
            }
            if v == to {
                let mut p = path.clone();
                p.push(v);
                out.push(p);
                continue;
            }
            if blocked.contains(&v) {
                continue;
            }
            path.push(v);
            rec(g, path, to, blocked, ignored, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, &mut vec![from], to, blocked, ignored, &mut out);
    out
}

/// Random DAG: random topological order, each forward pair with probability `p`.
pub fn random_dag(d: usize, p: f64, rng: &mut impl Rng) -> Dag {
    let mut order: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut g = Dag::new(d);
    for i in 0..d {
        for j in i + 1..d {
            if rng.random_bool(p) {
                g.add_edge(order[i], order[j]);
            }
        }
    }
    g
}

pub fn random_cpdag(d: usize, p: f64, rng: &mut impl Rng) -> Pdag {
    dag_to_cpdag(&random_dag(d, p, rng))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scorer over simulated data with default weights and noise.
pub fn simulated_scorer(d: usize, rho: f64, n: usize, seed: u64, alpha: f64) -> (Scorer, xges::simulate::GroundTruth) {
    let gt = sample_ground_truth(&SimConfig::new(d, rho, seed)).unwrap();
    let data = sample_data(&gt, n, seed).unwrap();
    (Scorer::new(&data, alpha).unwrap(), gt)
}

/// Every DAG in the class of a CPDAG: acyclic orientations of its undirected
/// edges that create no v-structure beyond those of its directed part.
pub fn members_of(c: &Pdag) -> Vec<Adj> {
    let und = c.undirected_edges();
    let base = from_dag(c);
    let mut full = base.clone();
    for &(a, b) in &und {
        full[a][b] = true;
        full[b][a] = true;
    }
    // Colliders of the directed part whose tails are non-adjacent in the skeleton.
    let target: BTreeSet<_> = v_structures(&base)
        .into_iter()
        .filter(|&(x, _, z)| !full[x][z])
        .collect();
    let mut out = Vec::new();
    for mask in 0..(1u64 << und.len()) {
        let mut m = base.clone();
        for (k, &(a, b)) in und.iter().enumerate() {
            if mask >> k & 1 == 1 {
                m[a][b] = true;
            } else {
                m[b][a] = true;
            }
        }
        if acyclic(&m) && v_structures(&m) == target {
            out.push(m);
        }
    }
    out
}
