use std::collections::HashMap;

use super::{ResourceId, SEdge, SNode, TypeIdx, VEdge, VNode};
use crate::extraction::Topology;
use crate::scalar::Scalar;

/// A substrate resource: a typed node resource `(τ, u)` or an edge `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resource {
    Node { ty: TypeIdx, node: SNode },
    Edge(SEdge),
}

/// Physical network with typed, capacitated node resources and directed edges.
///
/// Node, type and edge indices follow the lexicographic order of the external ids.
/// Node resources are indexed by `(type, node)` and precede the edge resources.
#[derive(Clone, Debug)]
pub struct SubstrateGraph<T> {
    pub(crate) node_ids: Vec<String>,
    pub(crate) type_ids: Vec<String>,
    pub(crate) edges: Vec<(SNode, SNode)>,
    pub(crate) edge_capacity: Vec<T>,
    pub(crate) edge_cost: Vec<T>,
    pub(crate) node_resources: Vec<(TypeIdx, SNode)>,
    pub(crate) node_res_capacity: Vec<T>,
    pub(crate) node_res_cost: Vec<T>,
    pub(crate) node_res_index: HashMap<(TypeIdx, SNode), usize>,
    pub(crate) edge_index: HashMap<(SNode, SNode), SEdge>,
    pub(crate) out_edges: Vec<Vec<SEdge>>,
    pub(crate) in_edges: Vec<Vec<SEdge>>,
    pub(crate) typed_nodes: Vec<Vec<SNode>>,
}

impl<T: Scalar> SubstrateGraph<T> {
    pub fn num_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_types(&self) -> usize {
        self.type_ids.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = SNode> {
        (0..self.node_ids.len()).map(SNode)
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = SEdge> {
        (0..self.edges.len()).map(SEdge)
    }

    pub fn node_id(&self, u: SNode) -> &str {
        &self.node_ids[u.0]
    }

    pub fn node_index(&self, id: &str) -> Option<SNode> {
        self.node_ids
            .binary_search_by(|n| n.as_str().cmp(id))
            .ok()
            .map(SNode)
    }

    pub fn type_id(&self, t: TypeIdx) -> &str {
        &self.type_ids[t.0]
    }

    pub fn type_index(&self, id: &str) -> Option<TypeIdx> {
        self.type_ids
            .binary_search_by(|n| n.as_str().cmp(id))
            .ok()
            .map(TypeIdx)
    }

    pub fn edge(&self, e: SEdge) -> (SNode, SNode) {
        self.edges[e.0]
    }

    pub fn edge_between(&self, u: SNode, v: SNode) -> Option<SEdge> {
        self.edge_index.get(&(u, v)).copied()
    }

    pub fn out_edges(&self, u: SNode) -> &[SEdge] {
        &self.out_edges[u.0]
    }

    pub fn in_edges(&self, u: SNode) -> &[SEdge] {
        &self.in_edges[u.0]
    }

    /// Nodes offering type `t`, ascending.
    pub fn typed_nodes(&self, t: TypeIdx) -> &[SNode] {
        &self.typed_nodes[t.0]
    }

    pub fn supports(&self, t: TypeIdx, u: SNode) -> bool {
        self.node_res_index.contains_key(&(t, u))
    }

    pub fn num_node_resources(&self) -> usize {
        self.node_resources.len()
    }

    pub fn num_resources(&self) -> usize {
        self.node_resources.len() + self.edges.len()
    }

    pub fn resources(&self) -> impl Iterator<Item = ResourceId> {
        (0..self.num_resources()).map(ResourceId)
    }

    pub fn resource(&self, r: ResourceId) -> Resource {
        let nr = self.node_resources.len();
        if r.0 < nr {
            let (ty, node) = self.node_resources[r.0];
            Resource::Node { ty, node }
        } else {
            Resource::Edge(SEdge(r.0 - nr))
        }
    }

    pub fn is_node_resource(&self, r: ResourceId) -> bool {
        r.0 < self.node_resources.len()
    }

    pub fn node_resource(&self, t: TypeIdx, u: SNode) -> Option<ResourceId> {
        self.node_res_index.get(&(t, u)).map(|&i| ResourceId(i))
    }

    pub fn edge_resource(&self, e: SEdge) -> ResourceId {
        ResourceId(self.node_resources.len() + e.0)
    }

    pub fn capacity(&self, r: ResourceId) -> T {
        let nr = self.node_resources.len();
        if r.0 < nr {
            self.node_res_capacity[r.0]
        } else {
            self.edge_capacity[r.0 - nr]
        }
    }

    pub fn cost(&self, r: ResourceId) -> T {
        let nr = self.node_resources.len();
        if r.0 < nr {
            self.node_res_cost[r.0]
        } else {
            self.edge_cost[r.0 - nr]
        }
    }

    /// Human readable resource label such as `cpu@u1` or `u1->u2`.
    pub fn resource_label(&self, r: ResourceId) -> String {
        match self.resource(r) {
            Resource::Node { ty, node } => format!("{}@{}", self.type_id(ty), self.node_id(node)),
            Resource::Edge(e) => {
                let (u, v) = self.edge(e);
                format!("{}->{}", self.node_id(u), self.node_id(v))
            }
        }
    }

    /// Returns a copy with every cost multiplied by `factor`.
    pub fn with_scaled_costs(&self, factor: T) -> Self {
        let mut s = self.clone();
        for c in s.edge_cost.iter_mut().chain(s.node_res_cost.iter_mut()) {
            *c = *c * factor;
        }
        s
    }
}

/// A virtual network request with placement and routing restrictions.
#[derive(Clone, Debug)]
pub struct Request<T> {
    pub(crate) id: String,
    pub(crate) profit: T,
    pub(crate) node_ids: Vec<String>,
    pub(crate) node_type: Vec<TypeIdx>,
    pub(crate) node_demand: Vec<T>,
    pub(crate) allowed_nodes: Vec<Vec<SNode>>,
    pub(crate) allowed_node_mask: Vec<Vec<bool>>,
    pub(crate) edges: Vec<(VNode, VNode)>,
    pub(crate) edge_demand: Vec<T>,
    pub(crate) allowed_edges: Vec<Vec<SEdge>>,
    pub(crate) allowed_edge_mask: Vec<Vec<bool>>,
    pub(crate) out_edges: Vec<Vec<VEdge>>,
    pub(crate) in_edges: Vec<Vec<VEdge>>,
}

impl<T: Scalar> Request<T> {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn profit(&self) -> T {
        self.profit
    }

    pub fn num_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = VNode> {
        (0..self.node_ids.len()).map(VNode)
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = VEdge> {
        (0..self.edges.len()).map(VEdge)
    }

    pub fn node_id(&self, i: VNode) -> &str {
        &self.node_ids[i.0]
    }

    pub fn node_index(&self, id: &str) -> Option<VNode> {
        self.node_ids
            .binary_search_by(|n| n.as_str().cmp(id))
            .ok()
            .map(VNode)
    }

    pub fn node_type(&self, i: VNode) -> TypeIdx {
        self.node_type[i.0]
    }

    pub fn node_demand(&self, i: VNode) -> T {
        self.node_demand[i.0]
    }

    pub fn allowed_nodes(&self, i: VNode) -> &[SNode] {
        &self.allowed_nodes[i.0]
    }

    pub fn is_allowed_node(&self, i: VNode, u: SNode) -> bool {
        self.allowed_node_mask[i.0][u.0]
    }

    pub fn edge(&self, e: VEdge) -> (VNode, VNode) {
        self.edges[e.0]
    }

    pub fn edge_between(&self, i: VNode, j: VNode) -> Option<VEdge> {
        self.edges
            .binary_search(&(i, j))
            .ok()
            .map(VEdge)
    }

    pub fn edge_demand(&self, e: VEdge) -> T {
        self.edge_demand[e.0]
    }

    pub fn allowed_edges(&self, e: VEdge) -> &[SEdge] {
        &self.allowed_edges[e.0]
    }

    pub fn is_allowed_edge(&self, e: VEdge, se: SEdge) -> bool {
        self.allowed_edge_mask[e.0][se.0]
    }

    pub fn out_edges(&self, i: VNode) -> &[VEdge] {
        &self.out_edges[i.0]
    }

    pub fn in_edges(&self, i: VNode) -> &[VEdge] {
        &self.in_edges[i.0]
    }

    /// `tail->head` label of a request edge.
    pub fn edge_label(&self, e: VEdge) -> String {
        let (i, j) = self.edge(e);
        format!("{}->{}", self.node_id(i), self.node_id(j))
    }

    /// Resources that some element of this request may be mapped onto, ascending.
    pub fn touched_resources(&self, substrate: &SubstrateGraph<T>) -> Vec<ResourceId> {
        let mut hit = vec![false; substrate.num_resources()];
        for i in self.nodes() {
            for &u in self.allowed_nodes(i) {
                if let Some(r) = substrate.node_resource(self.node_type(i), u) {
                    hit[r.0] = true;
                }
            }
        }
        for e in self.edge_indices() {
            for &se in self.allowed_edges(e) {
                hit[substrate.edge_resource(se).0] = true;
            }
        }
        hit.iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(r, _)| ResourceId(r))
            .collect()
    }

    /// Plain graph structure for extraction-order computations.
    pub fn topology(&self) -> Topology {
        Topology {
            node_names: self.node_ids.clone(),
            edges: self.edges.iter().map(|&(i, j)| (i.0, j.0)).collect(),
        }
    }

    /// Returns a copy with profit `b`.
    pub fn with_profit(&self, b: T) -> Self {
        let mut r = self.clone();
        r.profit = b;
        r
    }
}
