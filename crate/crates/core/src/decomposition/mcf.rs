use std::collections::BTreeSet;

use crate::extraction::ExtractionOrder;
use crate::lp::{McfRequestIndex, VarId};
use crate::model::{allocations_unchecked, Request, SEdge, SNode, SubstrateGraph, VEdge, VNode, ValidMapping};
use crate::scalar::Scalar;

use super::path::{find_connectivity_path, Direction};
use super::{ConvexDecomposition, DecompositionError, ResidualState, COMPLETENESS_TOL, EPS};

/// Decomposes the MCF solution of a tree request along `order`.
pub fn decompose_mcf_tree<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    order: &ExtractionOrder,
    ix: &McfRequestIndex,
    values: &[f64],
) -> Result<ConvexDecomposition, DecompositionError> {
    if request.num_edges() + 1 != request.num_nodes() {
        return Err(DecompositionError::NotATree);
    }
    extract(substrate, request, order, ix, values)
}

/// The tree extraction loop applied to any request. On cyclic requests it may force a node onto
/// two different substrate nodes, reported as [`DecompositionError::Conflict`].
pub fn decompose_mcf_naive<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    order: &ExtractionOrder,
    ix: &McfRequestIndex,
    values: &[f64],
) -> Result<ConvexDecomposition, DecompositionError> {
    extract(substrate, request, order, ix, values)
}

fn extract<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    order: &ExtractionOrder,
    ix: &McfRequestIndex,
    values: &[f64],
) -> Result<ConvexDecomposition, DecompositionError> {
    let mut state = ResidualState::new(values);
    let mut d = ConvexDecomposition::default();
    let loads = ix.loads(substrate);
    let limit = ix.flow.all_vars().len() + 1;
    let root = VNode(order.root);
    for _ in 0..=limit {
        let x = state.get(ix.x());
        if x <= EPS {
            return Ok(d);
        }
        let start = request
            .allowed_nodes(root)
            .iter()
            .copied()
            .find(|&u| ix.y(root, u).is_some_and(|v| state.get(v) > EPS));
        let Some(start) = start else {
            if x <= COMPLETENESS_TOL {
                return Ok(d);
            }
            return Err(DecompositionError::Stuck { node: root.0 });
        };

        let mut node_map: Vec<Option<SNode>> = vec![None; request.num_nodes()];
        let mut edge_map: Vec<Option<Vec<SEdge>>> = vec![None; request.num_edges()];
        node_map[root.0] = Some(start);
        let mut queue = BTreeSet::from([root.0]);
        while let Some(i) = queue.pop_first() {
            let u = node_map[i].expect("queued nodes are mapped");
            for &k in order.out_edges(i) {
                let oe = order.edges[k];
                let e = VEdge(oe.original);
                let dir = if oe.reversed {
                    Direction::Reverse
                } else {
                    Direction::Forward
                };
                let (v, path) = find_connectivity_path(
                    substrate,
                    &state,
                    &ix.flow,
                    e,
                    request.edge(e),
                    u,
                    dir,
                    None,
                )?;
                match node_map[oe.head] {
                    None => {
                        node_map[oe.head] = Some(v);
                        queue.insert(oe.head);
                    }
                    Some(w) if w != v => {
                        return Err(DecompositionError::Conflict {
                            node: oe.head,
                            first: w.0,
                            second: v.0,
                        })
                    }
                    Some(_) => {}
                }
                edge_map[e.0] = Some(path);
            }
        }
        let (Some(node_map), Some(edge_map)) = (
            node_map.into_iter().collect::<Option<Vec<_>>>(),
            edge_map.into_iter().collect::<Option<Vec<_>>>(),
        ) else {
            return Err(DecompositionError::Stuck { node: root.0 });
        };
        let m = ValidMapping { node_map, edge_map };

        let mut cover: BTreeSet<VarId> = BTreeSet::from([ix.x()]);
        for i in request.nodes() {
            cover.insert(ix.y(i, m.node_map[i.0]).expect("mapped onto an allowed node"));
        }
        for e in request.edge_indices() {
            for &se in &m.edge_map[e.0] {
                cover.insert(ix.z(e, se).expect("path uses allowed edges"));
            }
        }
        let f = cover.iter().map(|&v| state.get(v)).fold(f64::INFINITY, f64::min);
        for &v in &cover {
            state.subtract(v, f);
        }
        let a = allocations_unchecked(substrate, request, &m);
        for &(r, v) in &loads {
            state.subtract(v, f * a.get(r).as_f64());
        }
        d.push(f, m);
    }
    Err(DecompositionError::NoProgress(limit))
}
