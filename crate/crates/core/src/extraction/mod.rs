//! Extraction orders: rooted acyclic reorientations of requests, their edge labels, bags and width.

mod gadgets;
mod labels;
mod order;
mod search;

pub use gadgets::{
    generate_half_wheel, generate_vc_gadget, half_wheel_center_order, half_wheel_vertex_cover,
    is_cactus,
};
pub use labels::{compute_edge_bags, compute_edge_labels, label_order, Bag, LabeledExtractionOrder};
pub use order::{build_extraction_order, ExtractionOrder, OrientedEdge, Topology};
pub use search::{
    for_each_rooted_order, min_width_order_search, min_width_rooted_exhaustive, SearchStrategy,
    EXHAUSTIVE_NODE_LIMIT,
};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("graph is not weakly connected")]
    Disconnected,
    #[error("root {0} is not a node of the graph")]
    InvalidRoot(usize),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("orientation length {got} does not match {expected} edges")]
    OrientationLength { expected: usize, got: usize },
    #[error("orientation contains a directed cycle")]
    Cyclic,
    #[error("node {0} is not reachable from the root")]
    Unreachable(usize),
    #[error("root has incoming edges")]
    RootHasIncoming,
    #[error("exhaustive search supports at most {limit} nodes, got {nodes}")]
    TooLarge { nodes: usize, limit: usize },
}
