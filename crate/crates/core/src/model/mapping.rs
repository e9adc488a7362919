use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{Request, SubstrateGraph};
use super::{ResourceId, SEdge, SNode, VEdge, VNode};
use crate::scalar::{Scalar, FEASIBILITY_TOL};

/// Node placement plus one substrate path per request edge, by dense index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValidMapping {
    pub node_map: Vec<SNode>,
    pub edge_map: Vec<Vec<SEdge>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MappingViolation {
    #[error("incomplete mapping: expected {expected_nodes} nodes and {expected_edges} edges, got {nodes} and {edges}")]
    Incomplete {
        expected_nodes: usize,
        expected_edges: usize,
        nodes: usize,
        edges: usize,
    },
    #[error("node {node} mapped onto {target}, which is not allowed")]
    NodeNotAllowed { node: String, target: String },
    #[error("edge {edge} uses substrate edge {sedge}, which is not allowed")]
    EdgeNotAllowed { edge: String, sedge: String },
    #[error("path of edge {edge} does not connect {from} to {to}")]
    Disconnected { edge: String, from: String, to: String },
    #[error("path of edge {edge} revisits substrate node {node}")]
    NotSimple { edge: String, node: String },
}

impl ValidMapping {
    /// Serializable form using external ids.
    pub fn to_record<T: Scalar>(
        &self,
        substrate: &SubstrateGraph<T>,
        request: &Request<T>,
    ) -> MappingRecord {
        let node_map = self
            .node_map
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                (
                    request.node_id(VNode(i)).to_string(),
                    substrate.node_id(u).to_string(),
                )
            })
            .collect();
        let edge_map = self
            .edge_map
            .iter()
            .enumerate()
            .map(|(e, path)| {
                let (i, j) = request.edge(VEdge(e));
                EdgeRecord {
                    tail: request.node_id(i).to_string(),
                    head: request.node_id(j).to_string(),
                    path: path
                        .iter()
                        .map(|&se| {
                            let (u, v) = substrate.edge(se);
                            (
                                substrate.node_id(u).to_string(),
                                substrate.node_id(v).to_string(),
                            )
                        })
                        .collect(),
                }
            })
            .collect();
        MappingRecord { node_map, edge_map }
    }
}

/// Mapping in external ids: `node_map` request node → substrate node, one path per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRecord {
    pub node_map: BTreeMap<String, String>,
    pub edge_map: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub tail: String,
    pub head: String,
    pub path: Vec<(String, String)>,
}

impl MappingRecord {
    /// Resolves external ids; unknown ids and missing keys yield [`MappingViolation::Incomplete`].
    pub fn resolve<T: Scalar>(
        &self,
        substrate: &SubstrateGraph<T>,
        request: &Request<T>,
    ) -> Result<ValidMapping, MappingViolation> {
        let incomplete = || MappingViolation::Incomplete {
            expected_nodes: request.num_nodes(),
            expected_edges: request.num_edges(),
            nodes: self.node_map.len(),
            edges: self.edge_map.len(),
        };
        let mut node_map = Vec::with_capacity(request.num_nodes());
        for i in request.nodes() {
            let u = self
                .node_map
                .get(request.node_id(i))
                .and_then(|u| substrate.node_index(u))
                .ok_or_else(incomplete)?;
            node_map.push(u);
        }
        let mut edge_map = vec![None; request.num_edges()];
        for rec in &self.edge_map {
            let e = request
                .node_index(&rec.tail)
                .zip(request.node_index(&rec.head))
                .and_then(|(i, j)| request.edge_between(i, j))
                .ok_or_else(incomplete)?;
            let path = rec
                .path
                .iter()
                .map(|(u, v)| {
                    substrate
                        .node_index(u)
                        .zip(substrate.node_index(v))
                        .and_then(|(u, v)| substrate.edge_between(u, v))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(incomplete)?;
            edge_map[e.0] = Some(path);
        }
        let edge_map = edge_map
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(incomplete)?;
        Ok(ValidMapping { node_map, edge_map })
    }
}

/// Checks placement, path connectivity, allowed edges and simplicity; reports the first violation.
pub fn check_valid_mapping<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    m: &ValidMapping,
) -> Result<(), MappingViolation> {
    if m.node_map.len() != request.num_nodes() || m.edge_map.len() != request.num_edges() {
        return Err(MappingViolation::Incomplete {
            expected_nodes: request.num_nodes(),
            expected_edges: request.num_edges(),
            nodes: m.node_map.len(),
            edges: m.edge_map.len(),
        });
    }
    for i in request.nodes() {
        let u = m.node_map[i.0];
        if u.0 >= substrate.num_nodes() || !request.is_allowed_node(i, u) {
            return Err(MappingViolation::NodeNotAllowed {
                node: request.node_id(i).to_string(),
                target: if u.0 < substrate.num_nodes() {
                    substrate.node_id(u).to_string()
                } else {
                    format!("#{}", u.0)
                },
            });
        }
    }
    for e in request.edge_indices() {
        let (i, j) = request.edge(e);
        let (from, to) = (m.node_map[i.0], m.node_map[j.0]);
        let path = &m.edge_map[e.0];
        let mut visited = vec![from];
        let mut at = from;
        for &se in path {
            if se.0 >= substrate.num_edges() || !request.is_allowed_edge(e, se) {
                return Err(MappingViolation::EdgeNotAllowed {
                    edge: request.edge_label(e),
                    sedge: if se.0 < substrate.num_edges() {
                        substrate.resource_label(substrate.edge_resource(se))
                    } else {
                        format!("#{}", se.0)
                    },
                });
            }
            let (u, v) = substrate.edge(se);
            if u != at {
                break;
            }
            if visited.contains(&v) {
                return Err(MappingViolation::NotSimple {
                    edge: request.edge_label(e),
                    node: substrate.node_id(v).to_string(),
                });
            }
            visited.push(v);
            at = v;
        }
        if visited.len() != path.len() + 1 || at != to {
            return Err(MappingViolation::Disconnected {
                edge: request.edge_label(e),
                from: substrate.node_id(from).to_string(),
                to: substrate.node_id(to).to_string(),
            });
        }
    }
    Ok(())
}

/// Per-resource allocation `A(m, x, y)`, indexed by [`ResourceId`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct AllocationVector<T>(pub Vec<T>);

impl<T: Scalar> AllocationVector<T> {
    pub fn get(&self, r: ResourceId) -> T {
        self.0[r.0]
    }
}

/// Allocations induced by a valid mapping.
pub fn compute_allocations<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    m: &ValidMapping,
) -> Result<AllocationVector<T>, MappingViolation> {
    check_valid_mapping(substrate, request, m)?;
    Ok(allocations_unchecked(substrate, request, m))
}

pub(crate) fn allocations_unchecked<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    m: &ValidMapping,
) -> AllocationVector<T> {
    let mut a = vec![T::zero(); substrate.num_resources()];
    for i in request.nodes() {
        let r = substrate
            .node_resource(request.node_type(i), m.node_map[i.0])
            .expect("allowed node offers the type");
        a[r.0] = a[r.0] + request.node_demand(i);
    }
    for e in request.edge_indices() {
        for &se in &m.edge_map[e.0] {
            let r = substrate.edge_resource(se);
            a[r.0] = a[r.0] + request.edge_demand(e);
        }
    }
    AllocationVector(a)
}

/// `Σ c_S(x,y)·A(m,x,y)`.
pub fn mapping_cost<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    m: &ValidMapping,
) -> Result<T, MappingViolation> {
    let a = compute_allocations(substrate, request, m)?;
    Ok(substrate
        .resources()
        .map(|r| substrate.cost(r) * a.get(r))
        .fold(T::zero(), |s, v| s + v))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct FeasibilityReport<T> {
    pub feasible: bool,
    /// Load divided by capacity, per resource.
    pub utilization: Vec<T>,
}

impl<T: Scalar> FeasibilityReport<T> {
    pub fn max_node_utilization(&self, substrate: &SubstrateGraph<T>) -> T {
        self.utilization[..substrate.num_node_resources()]
            .iter()
            .fold(T::zero(), |m, &u| m.max(u))
    }

    pub fn max_edge_utilization(&self, substrate: &SubstrateGraph<T>) -> T {
        self.utilization[substrate.num_node_resources()..]
            .iter()
            .fold(T::zero(), |m, &u| m.max(u))
    }
}

/// Whether the summed allocations stay within `beta·d_S` on node resources and `gamma·d_S` on edges.
pub fn collection_feasible<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    mappings: &[(&Request<T>, &ValidMapping)],
    beta: T,
    gamma: T,
) -> FeasibilityReport<T> {
    let mut load = vec![T::zero(); substrate.num_resources()];
    for (req, m) in mappings {
        let a = allocations_unchecked(substrate, req, m);
        for (l, v) in load.iter_mut().zip(a.0) {
            *l = *l + v;
        }
    }
    let tol = T::from_f64_lossy(FEASIBILITY_TOL);
    let mut feasible = true;
    let utilization = substrate
        .resources()
        .map(|r| {
            let cap = substrate.capacity(r);
            let slack = if substrate.is_node_resource(r) { beta } else { gamma };
            if load[r.0] > slack * cap + tol {
                feasible = false;
            }
            load[r.0] / cap
        })
        .collect();
    FeasibilityReport {
        feasible,
        utilization,
    }
}
