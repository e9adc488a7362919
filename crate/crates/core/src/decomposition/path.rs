use std::collections::VecDeque;

use crate::model::{SEdge, SNode, SubstrateGraph, VEdge, VNode};
use crate::scalar::Scalar;

use super::{DecompositionError, ResidualState, EPS};
use crate::lp::FlowBlock;

/// Direction of a path search relative to the original request edge `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Start at the tail's node and follow flow towards a node hosting the head.
    Forward,
    /// Start at the head's node and follow flow backwards to a node hosting the tail.
    Reverse,
}

/// Shortest substrate path carrying positive flow of `edge` inside `block`, starting at `start`.
///
/// Returns `(other, path)` where `other` hosts the opposite endpoint and `path` runs from the
/// tail's node to the head's node. With `target`, only that node is accepted as `other`.
#[allow(clippy::too_many_arguments)]
pub fn find_connectivity_path<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    state: &ResidualState,
    block: &FlowBlock,
    edge: VEdge,
    (tail, head): (VNode, VNode),
    start: SNode,
    direction: Direction,
    target: Option<SNode>,
) -> Result<(SNode, Vec<SEdge>), DecompositionError> {
    let other = match direction {
        Direction::Forward => head,
        Direction::Reverse => tail,
    };
    let hosts = |w: SNode| {
        target.is_none_or(|t| t == w) && block.y(other, w).is_some_and(|v| state.get(v) > EPS)
    };
    let n = substrate.num_nodes();
    let mut pred: Vec<Option<SEdge>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start.0] = true;
    while let Some(w) = queue.pop_front() {
        if hosts(w) {
            let mut path = Vec::new();
            let mut cur = w;
            while let Some(se) = pred[cur.0] {
                path.push(se);
                let (a, b) = substrate.edge(se);
                cur = if direction == Direction::Forward { a } else { b };
            }
            if direction == Direction::Forward {
                path.reverse();
            }
            return Ok((w, path));
        }
        let next = match direction {
            Direction::Forward => substrate.out_edges(w),
            Direction::Reverse => substrate.in_edges(w),
        };
        for &se in next {
            let Some(z) = block.z(edge, se) else { continue };
            if state.get(z) <= EPS {
                continue;
            }
            let (a, b) = substrate.edge(se);
            let nb = if direction == Direction::Forward { b } else { a };
            if !seen[nb.0] {
                seen[nb.0] = true;
                pred[nb.0] = Some(se);
                queue.push_back(nb);
            }
        }
    }
    Err(DecompositionError::NoFlowPath {
        edge: edge.0,
        start: start.0,
    })
}
