//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use vnep::extraction::ExtractionOrder;

/// Every simple directed path `from ⇝ to` as a list of oriented edge indices.
pub fn simple_paths(x: &ExtractionOrder, from: usize, to: usize) -> Vec<Vec<usize>> {
    fn go(
        x: &ExtractionOrder,
        at: usize,
        to: usize,
        seen: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == to {
            out.push(path.clone());
            return;
        }
        for &e in x.out_edges(at) {
            let h = x.edges[e].head;
            if seen[h] {
                continue;
            }
            seen[h] = true;
            path.push(e);
            go(x, h, to, seen, path, out);
            path.pop();
            seen[h] = false;
        }
    }
    let mut seen = vec![false; x.num_nodes];
    seen[from] = true;
    let mut out = Vec::new();
    go(x, from, to, &mut seen, &mut Vec::new(), &mut out);
    out
}

fn inner_nodes(x: &ExtractionOrder, path: &[usize]) -> BTreeSet<usize> {
    path[..path.len() - 1].iter().map(|&e| x.edges[e].head).collect()
}

/// Labels straight from the confluence definition: `e` gets `j` iff it lies on one of two
/// distinct, internally node-disjoint `i ⇝ j` paths for some `i`.
pub fn brute_force_labels(x: &ExtractionOrder) -> Vec<BTreeSet<usize>> {
    let n = x.num_nodes;
    let mut labels = vec![BTreeSet::new(); x.edges.len()];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let paths = simple_paths(x, i, j);
            for a in 0..paths.len() {
                for b in a + 1..paths.len() {
                    let (p, q) = (&paths[a], &paths[b]);
                    if inner_nodes(x, p).is_disjoint(&inner_nodes(x, q))
                        && p.iter().all(|e| !q.contains(e))
                    {
                        for &e in p.iter().chain(q) {
                            labels[e].insert(j);
                        }
                    }
                }
            }
        }
    }
    labels
}

/// Confluence targets of `x` per the brute-force labeling.
pub fn confluence_targets(x: &ExtractionOrder) -> BTreeSet<usize> {
    brute_force_labels(x).into_iter().flatten().collect()
}

/// Minimum vertex cover size by subset enumeration.
pub fn min_vertex_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(a, b)| mask & (1 << a) != 0 || mask & (1 << b) != 0))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// `|a − b| ≤ tol·max(1, |b|)`.
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
