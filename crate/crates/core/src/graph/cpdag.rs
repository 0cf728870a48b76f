//! Conversions between DAGs, PDAGs and their canonical CPDAG.

use super::{Dag, Pdag};
use crate::error::{Error, Result};
use crate::NodeId;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Label {
    Unknown,
    Compelled,
    Reversible,
}

/// CPDAG of the equivalence class of `g`: compelled edges stay directed,
/// reversible edges become undirected.
///
/// Edges are visited in the order used by Chickering (1995): targets by
/// increasing topological rank, and for each target its parents by
/// decreasing rank.
pub fn dag_to_cpdag(g: &Dag) -> Pdag {
    let d = g.d();
    let order = g
        .topological_order()
        .expect("Dag values are acyclic by construction");
    let mut rank = vec![0; d];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut label = vec![Label::Unknown; d * d];
    let idx = |x: NodeId, y: NodeId| x * d + y;

    for &y in &order {
        let mut parents = g.parents(y).to_vec();
        parents.sort_unstable_by_key(|&x| std::cmp::Reverse(rank[x]));
        for &x in &parents {
            if label[idx(x, y)] != Label::Unknown {
                continue;
            }
            let mut done = false;
            for w in g.parents(x) {
                if label[idx(w, x)] != Label::Compelled {
                    continue;
                }
                if !g.parents(y).contains(w) {
                    for z in g.parents(y) {
                        label[idx(z, y)] = Label::Compelled;
                    }
                    done = true;
                    break;
                }
                label[idx(w, y)] = Label::Compelled;
            }
            if done {
                continue;
            }
            let shielded_elsewhere = g
                .parents(y)
                .iter()
                .any(|z| z != x && !g.parents(x).contains(z));
            let fill = if shielded_elsewhere {
                Label::Compelled
            } else {
                Label::Reversible
            };
            for z in g.parents(y) {
                if label[idx(z, y)] == Label::Unknown {
                    label[idx(z, y)] = fill;
                }
            }
        }
    }

    let mut out = Pdag::new(d);
    for (x, y) in g.directed_edges() {
        match label[idx(x, y)] {
            Label::Compelled => out.add_directed(x, y),
            _ => out.add_undirected(x, y),
        }
    }
    out
}

/// A DAG with the skeleton and v-structures of `g` that keeps every directed
/// edge of `g`, built by repeatedly removing a sink (Dor and Tarsi, 1992).
///
/// Among eligible sinks the smallest index is removed first, so the result is
/// deterministic.
pub fn consistent_extension(g: &Pdag) -> Result<Dag> {
    let d = g.d();
    let mut rest = g.clone();
    let mut alive = vec![true; d];
    let mut out = Pdag::new(d);
    for (a, b) in g.directed_edges() {
        out.add_directed(a, b);
    }
    for _ in 0..d {
        let sink = (0..d).find(|&x| {
            if !alive[x] || !rest.children(x).is_empty() {
                return false;
            }
            let adj = rest.adjacent(x);
            rest.neighbors(x).iter().all(|y| {
                let adj_y = rest.adjacent(y);
                adj.iter().all(|z| z == y || adj_y.contains(z))
            })
        });
        let Some(x) = sink else {
            return Err(Error::NoExtension);
        };
        for y in rest.neighbors(x).clone().iter() {
            out.add_directed(y, x);
        }
        for y in rest.adjacent(x).iter() {
            rest.remove_edge(x, y);
        }
        alive[x] = false;
    }
    Ok(Dag(out))
}

/// Canonical CPDAG of the class represented by an extendable PDAG.
pub fn complete_pdag(g: &Pdag) -> Result<Pdag> {
    consistent_extension(g).map(|dag| dag_to_cpdag(&dag))
}

/// Two CPDAGs describe the same class iff they are identical.
pub fn mec_equal(p: &Pdag, q: &Pdag) -> bool {
    p == q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(d: usize, edges: &[(NodeId, NodeId)]) -> Dag {
        Dag::from_edges(d, edges).unwrap()
    }

    #[test]
    fn chain_becomes_undirected() {
        let c = dag_to_cpdag(&dag(3, &[(0, 1), (1, 2)]));
        assert_eq!(c.undirected_edges(), vec![(0, 1), (1, 2)]);
        assert!(c.directed_edges().is_empty());
    }

    #[test]
    fn collider_is_kept() {
        let c = dag_to_cpdag(&dag(3, &[(0, 1), (2, 1)]));
        assert_eq!(c.directed_edges(), vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn single_edge() {
        let c = dag_to_cpdag(&dag(2, &[(0, 1)]));
        assert_eq!(c.undirected_edges(), vec![(0, 1)]);
    }

    #[test]
    fn compelled_downstream_of_collider() {
        // 0 → 2 ← 1, 2 → 3: the last edge is compelled.
        let c = dag_to_cpdag(&dag(4, &[(0, 2), (1, 2), (2, 3)]));
        assert_eq!(c.directed_edges(), vec![(0, 2), (1, 2), (2, 3)]);
    }

    #[test]
    fn extension_of_undirected_chain() {
        let g = Pdag::from_edges(3, &[], &[(0, 1), (1, 2)]).unwrap();
        let ext = consistent_extension(&g).unwrap();
        assert!(ext.is_dag());
        assert_eq!(ext.skeleton(), g.skeleton());
        assert!(ext.v_structures().is_empty());
    }

    #[test]
    fn extension_keeps_collider_and_orients_away() {
        let g = Pdag::from_edges(4, &[(0, 1), (2, 1)], &[(1, 3)]).unwrap();
        let ext = consistent_extension(&g).unwrap();
        assert!(ext.has_directed(1, 3));
        assert_eq!(ext.v_structures(), vec![(0, 1, 2)]);
    }

    #[test]
    fn extension_of_dag_is_identity() {
        let d = dag(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(consistent_extension(&d).unwrap(), d);
    }

    #[test]
    fn extension_fails_on_chordless_cycle() {
        // An undirected 4-cycle cannot be oriented without a new collider.
        let g = Pdag::from_edges(4, &[], &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(consistent_extension(&g).is_err());
    }

    #[test]
    fn completion_examples() {
        let g = Pdag::from_edges(3, &[(0, 1)], &[(1, 2)]).unwrap();
        let c = complete_pdag(&g).unwrap();
        assert_eq!(c.undirected_edges(), vec![(0, 1), (1, 2)]);

        let collider = Pdag::from_edges(3, &[(0, 1), (2, 1)], &[]).unwrap();
        assert_eq!(complete_pdag(&collider).unwrap(), collider);
        let again = complete_pdag(&c).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn mec_equality() {
        let a = dag_to_cpdag(&dag(3, &[(0, 1), (1, 2)]));
        let b = dag_to_cpdag(&dag(3, &[(2, 1), (1, 0)]));
        let c = dag_to_cpdag(&dag(3, &[(0, 1), (2, 1)]));
        assert!(mec_equal(&a, &a));
        assert!(mec_equal(&a, &b));
        assert!(!mec_equal(&a, &c));
    }
}
