use std::collections::BTreeSet;

use crate::lp::{NovelRequestIndex, VarId};
use crate::model::{allocations_unchecked, Request, SEdge, SNode, SubstrateGraph, VEdge, VNode, ValidMapping};
use crate::scalar::Scalar;

use super::path::{find_connectivity_path, Direction};
use super::{ConvexDecomposition, DecompositionError, ResidualState, COMPLETENESS_TOL, EPS};

/// Decomposes the novel-formulation solution of one request.
///
/// Each iteration maps the root onto its smallest positively used node, then processes mapped
/// nodes smallest index first: every bag fixes its labels through a positive bag variable that
/// agrees with the labels mapped so far, and every bag edge is routed inside the sub-LP selected
/// by its label mapping. A node is queued once all of its incoming edges are mapped.
pub fn decompose_novel<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    ix: &NovelRequestIndex,
    values: &[f64],
) -> Result<ConvexDecomposition, DecompositionError> {
    let order = &ix.order.order;
    let mut state = ResidualState::new(values);
    let mut d = ConvexDecomposition::default();
    let limit = values.len() + 1;
    let root = VNode(order.root);
    for _ in 0..=limit {
        let x = state.get(ix.x);
        if x <= EPS {
            return Ok(d);
        }
        let stuck = |node: usize, d: ConvexDecomposition| {
            if x <= COMPLETENESS_TOL {
                Ok(d)
            } else {
                Err(DecompositionError::Stuck { node })
            }
        };
        let start = ix.y[root.0]
            .iter()
            .find(|&&(_, v)| state.get(v) > EPS)
            .map(|p| p.0);
        let Some(start) = start else {
            return stuck(root.0, d);
        };

        let mut node_map: Vec<Option<SNode>> = vec![None; request.num_nodes()];
        let mut edge_map: Vec<Option<Vec<SEdge>>> = vec![None; request.num_edges()];
        let mut sub_index: Vec<usize> = vec![0; request.num_edges()];
        let mut cover: BTreeSet<VarId> = BTreeSet::from([ix.x]);
        node_map[root.0] = Some(start);
        let mut queue = BTreeSet::from([root.0]);
        let mut failed = None;
        'queue: while let Some(i) = queue.pop_first() {
            let u = node_map[i].expect("queued nodes are mapped");
            let k_u = request
                .allowed_nodes(VNode(i))
                .binary_search(&u)
                .expect("mapped onto an allowed node");
            for (b, bag) in ix.order.bags[i].iter().enumerate() {
                let bsp = &ix.bag_spaces[i][b];
                let gammas = &ix.gamma[i][b][k_u];
                let chosen = (0..bsp.len()).find(|&a| {
                    state.get(gammas[a]) > EPS
                        && bsp
                            .assignment(a)
                            .iter()
                            .zip(&bsp.labels)
                            .all(|(&w, l)| node_map[l.0].is_none_or(|m| m == w))
                });
                let Some(a) = chosen else {
                    failed = Some(i);
                    break 'queue;
                };
                cover.insert(gammas[a]);
                for (&w, l) in bsp.assignment(a).iter().zip(&bsp.labels) {
                    node_map[l.0].get_or_insert(w);
                }
                for &e in &bag.edges {
                    let oe = order.edges[e];
                    let esp = &ix.edge_spaces[e];
                    let m = esp
                        .index_with(|l| node_map[l.0].expect("edge labels are bag labels"))
                        .expect("label nodes are allowed");
                    sub_index[e] = m;
                    let block = &ix.sub[e][m];
                    let dir = if oe.reversed {
                        Direction::Reverse
                    } else {
                        Direction::Forward
                    };
                    let j = oe.head;
                    let (v, path) = find_connectivity_path(
                        substrate,
                        &state,
                        block,
                        VEdge(e),
                        request.edge(VEdge(e)),
                        u,
                        dir,
                        node_map[j],
                    )?;
                    node_map[j].get_or_insert(v);
                    edge_map[e] = Some(path);
                    if order.in_edges(j).iter().all(|&k| edge_map[k].is_some()) {
                        queue.insert(j);
                    }
                }
            }
        }
        if let Some(node) = failed {
            return stuck(node, d);
        }
        let (Some(node_map), Some(edge_map)) = (
            node_map.into_iter().collect::<Option<Vec<_>>>(),
            edge_map.into_iter().collect::<Option<Vec<_>>>(),
        ) else {
            return stuck(root.0, d);
        };
        let m = ValidMapping { node_map, edge_map };

        for i in request.nodes() {
            cover.insert(ix.y(i, m.node_map[i.0]).expect("mapped onto an allowed node"));
        }
        for e in request.edge_indices() {
            let block = &ix.sub[e.0][sub_index[e.0]];
            let (i, j) = request.edge(e);
            cover.insert(block.x);
            cover.insert(block.y(i, m.node_map[i.0]).expect("allowed"));
            cover.insert(block.y(j, m.node_map[j.0]).expect("allowed"));
            for &se in &m.edge_map[e.0] {
                cover.insert(block.z(e, se).expect("path uses allowed edges"));
            }
        }
        let f = cover.iter().map(|&v| state.get(v)).fold(f64::INFINITY, f64::min);
        for &v in &cover {
            state.subtract(v, f);
        }
        let a = allocations_unchecked(substrate, request, &m);
        for &(r, v) in &ix.loads {
            state.subtract(v, f * a.get(r).as_f64());
        }
        for e in request.edge_indices() {
            let block = &ix.sub[e.0][sub_index[e.0]];
            let demand = request.edge_demand(e).as_f64();
            for &se in &m.edge_map[e.0] {
                if let Some(v) = block.edge_load(se) {
                    state.subtract(v, f * demand);
                }
            }
        }
        d.push(f, m);
    }
    Err(DecompositionError::NoProgress(limit))
}
