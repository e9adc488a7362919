use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::labels::{label_order, LabeledExtractionOrder};
use super::order::{build_extraction_order, ExtractionOrder, Topology};
use super::ExtractionError;

/// Largest request handled by exhaustive order search.
pub const EXHAUSTIVE_NODE_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStrategy {
    /// One BFS order per root, minimum width, ties to the smallest root.
    PerRootBfs,
    /// Every root and every acyclic root-reachable orientation.
    Exhaustive,
}

pub fn min_width_order_search(
    topo: &Topology,
    strategy: SearchStrategy,
) -> Result<LabeledExtractionOrder, ExtractionError> {
    if !topo.is_weakly_connected() {
        return Err(ExtractionError::Disconnected);
    }
    match strategy {
        SearchStrategy::PerRootBfs => {
            let mut best: Option<LabeledExtractionOrder> = None;
            for root in 0..topo.num_nodes() {
                let l = label_order(build_extraction_order(topo, root)?);
                if best.as_ref().is_none_or(|b| l.width < b.width) {
                    best = Some(l);
                }
            }
            best.ok_or(ExtractionError::InvalidRoot(0))
        }
        SearchStrategy::Exhaustive => {
            check_size(topo)?;
            let mut best: Option<LabeledExtractionOrder> = None;
            for root in 0..topo.num_nodes() {
                let l = min_width_rooted_exhaustive(topo, root)?;
                if best.as_ref().is_none_or(|b| l.width < b.width) {
                    best = Some(l);
                }
            }
            best.ok_or(ExtractionError::InvalidRoot(0))
        }
    }
}

fn check_size(topo: &Topology) -> Result<(), ExtractionError> {
    if topo.num_nodes() > EXHAUSTIVE_NODE_LIMIT {
        return Err(ExtractionError::TooLarge {
            nodes: topo.num_nodes(),
            limit: EXHAUSTIVE_NODE_LIMIT,
        });
    }
    Ok(())
}

/// Minimum-width order among all orders rooted at `root`.
pub fn min_width_rooted_exhaustive(
    topo: &Topology,
    root: usize,
) -> Result<LabeledExtractionOrder, ExtractionError> {
    check_size(topo)?;
    let mut best: Option<LabeledExtractionOrder> = None;
    for_each_rooted_order(topo, root, |x| {
        if best.as_ref().is_some_and(|b| b.width == 1) {
            return;
        }
        let l = label_order(x.clone());
        if best.as_ref().is_none_or(|b| l.width < b.width) {
            best = Some(l);
        }
    })?;
    best.ok_or(ExtractionError::Disconnected)
}

/// Calls `visit` once for every distinct valid extraction order rooted at `root`.
///
/// Orders are generated from linear extensions in which each node after the root is adjacent
/// to an earlier one, deduplicated by orientation.
pub fn for_each_rooted_order(
    topo: &Topology,
    root: usize,
    mut visit: impl FnMut(&ExtractionOrder),
) -> Result<(), ExtractionError> {
    check_size(topo)?;
    let n = topo.num_nodes();
    if root >= n {
        return Err(ExtractionError::InvalidRoot(root));
    }
    if !topo.is_weakly_connected() {
        return Err(ExtractionError::Disconnected);
    }
    let adj = topo.undirected_adjacency();
    let mut seen_orientations: HashSet<Vec<bool>> = HashSet::new();
    let mut pos = vec![usize::MAX; n];
    pos[root] = 0;
    let mut err = None;
    extend(
        topo,
        &adj,
        &mut pos,
        1,
        &mut |pos: &[usize]| {
            let reversed: Vec<bool> = topo.edges.iter().map(|&(a, b)| pos[a] > pos[b]).collect();
            if seen_orientations.insert(reversed.clone()) {
                match ExtractionOrder::from_orientation(topo, root, &reversed) {
                    Ok(x) => visit(&x),
                    Err(e) => err = Some(e),
                }
            }
        },
    );
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn extend(
    topo: &Topology,
    adj: &[Vec<(usize, usize)>],
    pos: &mut Vec<usize>,
    placed: usize,
    emit: &mut dyn FnMut(&[usize]),
) {
    let n = topo.num_nodes();
    if placed == n {
        emit(pos);
        return;
    }
    for v in 0..n {
        if pos[v] != usize::MAX || !adj[v].iter().any(|&(w, _)| pos[w] != usize::MAX) {
            continue;
        }
        pos[v] = placed;
        extend(topo, adj, pos, placed + 1, emit);
        pos[v] = usize::MAX;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(n: usize, edges: &[(usize, usize)]) -> Topology {
        Topology {
            node_names: (0..n).map(|k| format!("n{k}")).collect(),
            edges: edges.to_vec(),
        }
    }

    #[test]
    fn tree_has_width_one_from_every_root() {
        let t = topo(4, &[(0, 1), (1, 2), (3, 1)]);
        for strategy in [SearchStrategy::PerRootBfs, SearchStrategy::Exhaustive] {
            assert_eq!(min_width_order_search(&t, strategy).unwrap().width, 1);
        }
    }

    #[test]
    fn triangle_has_width_two() {
        let t = topo(3, &[(0, 1), (1, 2), (2, 0)]);
        for strategy in [SearchStrategy::PerRootBfs, SearchStrategy::Exhaustive] {
            assert_eq!(min_width_order_search(&t, strategy).unwrap().width, 2);
        }
    }

    #[test]
    fn exhaustive_rejects_large_requests() {
        let edges: Vec<(usize, usize)> = (0..9).map(|k| (k, k + 1)).collect();
        let err = min_width_order_search(&topo(10, &edges), SearchStrategy::Exhaustive).unwrap_err();
        assert_eq!(err, ExtractionError::TooLarge { nodes: 10, limit: 8 });
    }

    #[test]
    fn rooted_orders_of_a_square_are_counted() {
        // 4-cycle rooted at 0: node 2 (opposite) must be a sink or a middle node of a path.
        let t = topo(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let mut count = 0;
        for_each_rooted_order(&t, 0, |_| count += 1).unwrap();
        // orientations with 0 a source, acyclic, all reachable: 0->1,0->3 fixed; edges 1-2, 2-3:
        // 1->2,3->2 ; 1->2,2->3 ; 2->1,3->2
        assert_eq!(count, 3);
    }
}
