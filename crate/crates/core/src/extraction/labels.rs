use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::order::ExtractionOrder;

/// An equivalence class of a node's outgoing edges under transitive label overlap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bag {
    /// Oriented edge indices, ascending.
    pub edges: Vec<usize>,
    /// Union of the member edges' labels, ascending.
    pub labels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExtractionOrder {
    pub order: ExtractionOrder,
    /// `labels[e]`: sorted label set of edge `e`.
    pub labels: Vec<Vec<usize>>,
    /// `bags[v]`: bags of node `v`, ordered by their smallest edge.
    pub bags: Vec<Vec<Bag>>,
    /// Label `j` → the node where all confluences targeting `j` originate.
    pub label_roots: BTreeMap<usize, usize>,
    pub width: usize,
}

impl LabeledExtractionOrder {
    pub fn root(&self) -> usize {
        self.order.root
    }

    /// Index of the bag of `v` containing oriented edge `e`.
    pub fn bag_of(&self, v: usize, e: usize) -> Option<usize> {
        self.bags[v].iter().position(|b| b.edges.contains(&e))
    }
}

/// Labels edge `e` with `j` whenever `e` lies on an `i ⇝ j` path and two internally
/// node-disjoint `i ⇝ j` paths exist.
pub fn compute_edge_labels(x: &ExtractionOrder) -> Vec<Vec<usize>> {
    let n = x.num_nodes;
    let from: Vec<Vec<bool>> = (0..n).map(|v| x.reachable_from(v)).collect();
    let to: Vec<Vec<bool>> = (0..n).map(|v| x.reaching(v)).collect();
    let mut labels = vec![Vec::new(); x.edges.len()];
    for j in 0..n {
        for i in 0..n {
            if i == j || !from[i][j] || !has_two_disjoint_paths(x, i, j, &from, &to) {
                continue;
            }
            for (k, e) in x.edges.iter().enumerate() {
                if from[i][e.tail] && to[j][e.head] && labels[k].last() != Some(&j) {
                    labels[k].push(j);
                }
            }
        }
    }
    labels
}

fn has_two_disjoint_paths(
    x: &ExtractionOrder,
    i: usize,
    j: usize,
    from: &[Vec<bool>],
    to: &[Vec<bool>],
) -> bool {
    let direct = x.out_edges(i).iter().filter(|&&k| x.edges[k].head == j).count();
    if direct >= 2 {
        return true;
    }
    let detour = x.out_edges(i).iter().any(|&k| {
        let h = x.edges[k].head;
        h != j && to[j][h]
    });
    if direct == 1 {
        return detour;
    }
    if !detour {
        return false;
    }
    (0..x.num_nodes)
        .filter(|&k| k != i && k != j && from[i][k] && to[j][k])
        .all(|k| x.reachable_avoiding(i, k)[j])
}

/// Partitions each node's outgoing edges by transitive label overlap.
pub fn compute_edge_bags(x: &ExtractionOrder, labels: &[Vec<usize>]) -> Vec<Vec<Bag>> {
    (0..x.num_nodes)
        .map(|v| {
            let out = x.out_edges(v);
            let mut parent: Vec<usize> = (0..out.len()).collect();
            fn find(p: &mut [usize], a: usize) -> usize {
                let mut r = a;
                while p[r] != r {
                    r = p[r];
                }
                let mut c = a;
                while p[c] != r {
                    let nx = p[c];
                    p[c] = r;
                    c = nx;
                }
                r
            }
            for a in 0..out.len() {
                for b in a + 1..out.len() {
                    let (la, lb) = (&labels[out[a]], &labels[out[b]]);
                    if la.iter().any(|l| lb.binary_search(l).is_ok()) {
                        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (a, &e) in out.iter().enumerate() {
                let r = find(&mut parent, a);
                groups.entry(r).or_default().push(e);
            }
            let mut bags: Vec<Bag> = groups
                .into_values()
                .map(|mut edges| {
                    edges.sort_unstable();
                    let mut ls: Vec<usize> =
                        edges.iter().flat_map(|&e| labels[e].iter().copied()).collect();
                    ls.sort_unstable();
                    ls.dedup();
                    Bag { edges, labels: ls }
                })
                .collect();
            bags.sort_by_key(|b| b.edges[0]);
            bags
        })
        .collect()
}

fn label_roots(x: &ExtractionOrder, labels: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    let mut roots = BTreeMap::new();
    let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, ls) in labels.iter().enumerate() {
        for &l in ls {
            by_label.entry(l).or_default().push(k);
        }
    }
    for (j, edges) in by_label {
        let to_j = x.reaching(j);
        let mut tails: Vec<usize> = edges.iter().map(|&k| x.edges[k].tail).collect();
        tails.sort_unstable();
        tails.dedup();
        let root = tails.iter().copied().find(|&c| {
            let from_c = x.reachable_from(c);
            edges
                .iter()
                .all(|&k| from_c[x.edges[k].tail] && to_j[x.edges[k].head])
        });
        if let Some(c) = root {
            roots.insert(j, c);
        }
    }
    roots
}

/// Labels, bags, label roots and width of an order.
pub fn label_order(x: ExtractionOrder) -> LabeledExtractionOrder {
    let labels = compute_edge_labels(&x);
    let bags = compute_edge_bags(&x, &labels);
    let label_roots = label_roots(&x, &labels);
    let width = 1 + bags
        .iter()
        .flatten()
        .map(|b| b.labels.len())
        .max()
        .unwrap_or(0);
    LabeledExtractionOrder {
        order: x,
        labels,
        bags,
        label_roots,
        width,
    }
}

#[cfg(test)]
mod tests {
    use super::super::order::{build_extraction_order, Topology};
    use super::*;

    fn topo(n: usize, edges: &[(usize, usize)]) -> Topology {
        Topology {
            node_names: (0..n).map(|k| format!("n{k}")).collect(),
            edges: edges.to_vec(),
        }
    }

    #[test]
    fn tree_has_no_labels_and_width_one() {
        let t = topo(5, &[(0, 1), (0, 2), (2, 3), (4, 2)]);
        let l = label_order(build_extraction_order(&t, 0).unwrap());
        assert!(l.labels.iter().all(Vec::is_empty));
        assert_eq!(l.width, 1);
    }

    #[test]
    fn single_node_has_width_one() {
        let l = label_order(build_extraction_order(&topo(1, &[]), 0).unwrap());
        assert_eq!(l.width, 1);
        assert!(l.bags[0].is_empty());
    }

    #[test]
    fn triangle_labels_the_confluence_target() {
        let t = topo(3, &[(0, 1), (1, 2), (2, 0)]);
        let l = label_order(build_extraction_order(&t, 0).unwrap());
        assert_eq!(l.labels, vec![vec![2], vec![2], vec![2]]);
        assert_eq!(l.width, 2);
        assert_eq!(l.label_roots.get(&2), Some(&0));
    }

    #[test]
    fn single_direct_edge_is_not_a_confluence() {
        let t = topo(2, &[(0, 1)]);
        let l = label_order(build_extraction_order(&t, 0).unwrap());
        assert!(l.labels[0].is_empty());
    }

    #[test]
    fn parallel_edges_form_a_confluence() {
        let t = topo(2, &[(0, 1), (1, 0)]);
        let l = label_order(build_extraction_order(&t, 0).unwrap());
        assert_eq!(l.labels, vec![vec![1], vec![1]]);
        assert_eq!(l.width, 2);
    }

    #[test]
    fn bags_merge_transitively() {
        // node 0 with outgoing labels {j}, {j,k}, {l} in the style of the bag example
        let x = build_extraction_order(&topo(4, &[(0, 1), (0, 2), (0, 3)]), 0).unwrap();
        let labels = vec![vec![7], vec![7, 8], vec![9]];
        let bags = compute_edge_bags(&x, &labels);
        assert_eq!(
            bags[0],
            vec![
                Bag {
                    edges: vec![0, 1],
                    labels: vec![7, 8]
                },
                Bag {
                    edges: vec![2],
                    labels: vec![9]
                }
            ]
        );
    }

    #[test]
    fn empty_labels_give_singleton_bags() {
        let x = build_extraction_order(&topo(3, &[(0, 1), (0, 2)]), 0).unwrap();
        let bags = compute_edge_bags(&x, &[vec![], vec![]]);
        assert_eq!(bags[0].len(), 2);
    }
}
