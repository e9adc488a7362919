use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::graph::{Request, SubstrateGraph};
use super::{SEdge, SNode, TypeIdx, VEdge, VNode};
use crate::scalar::Scalar;

/// A validated substrate together with its requests.
#[derive(Clone, Debug)]
pub struct Instance<T> {
    pub substrate: SubstrateGraph<T>,
    pub requests: Vec<Request<T>>,
}

impl<T: Scalar> Instance<T> {
    /// Same substrate with a subset of the requests, in the given order.
    pub fn with_requests(&self, keep: &[usize]) -> Self {
        Instance {
            substrate: self.substrate.clone(),
            requests: keep.iter().map(|&r| self.requests[r].clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawInstance<T> {
    pub substrate: RawSubstrate<T>,
    pub requests: Vec<RawRequest<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawSubstrate<T> {
    pub nodes: Vec<RawSubstrateNode<T>>,
    #[serde(default)]
    pub edges: Vec<RawSubstrateEdge<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawSubstrateNode<T> {
    pub id: String,
    #[serde(default)]
    pub types: Vec<RawNodeType<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawNodeType<T> {
    #[serde(rename = "type")]
    pub ty: String,
    pub capacity: T,
    #[serde(default)]
    pub cost: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawSubstrateEdge<T> {
    pub tail: String,
    pub head: String,
    pub capacity: T,
    #[serde(default)]
    pub cost: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawRequest<T> {
    pub id: String,
    pub profit: T,
    pub nodes: Vec<RawRequestNode<T>>,
    #[serde(default)]
    pub edges: Vec<RawRequestEdge<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawRequestNode<T> {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub demand: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_nodes: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RawRequestEdge<T> {
    pub tail: String,
    pub head: String,
    pub demand: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_edges: Option<Vec<(String, String)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    DuplicateId,
    UnknownId,
    SelfLoop,
    NonPositiveCapacity,
    NegativeCost,
    NegativeDemand,
    NonPositiveProfit,
    UnsupportedType,
    CapacityFilter,
    EmptyAllowedSet,
    EmptyRequest,
    Disconnected,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IssueKind::DuplicateId => "duplicate id",
            IssueKind::UnknownId => "unknown id",
            IssueKind::SelfLoop => "self-loop",
            IssueKind::NonPositiveCapacity => "non-positive capacity",
            IssueKind::NegativeCost => "negative cost",
            IssueKind::NegativeDemand => "negative demand",
            IssueKind::NonPositiveProfit => "non-positive profit",
            IssueKind::UnsupportedType => "unsupported type",
            IssueKind::CapacityFilter => "capacity filter",
            IssueKind::EmptyAllowedSet => "empty allowed set",
            IssueKind::EmptyRequest => "empty request",
            IssueKind::Disconnected => "disconnected request",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub kind: IssueKind,
    pub location: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind, self.location, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, kind: IssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }

    fn push(&mut self, kind: IssueKind, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ValidationIssue {
            kind,
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return f.write_str("pass");
        }
        for (k, issue) in self.issues.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

fn finite<T: Scalar>(v: T) -> bool {
    v.is_finite()
}

struct SubstrateIndex<'a, T> {
    nodes: BTreeSet<&'a str>,
    node_caps: HashMap<(&'a str, &'a str), T>,
    edges: HashMap<(&'a str, &'a str), T>,
    types: BTreeSet<&'a str>,
}

/// Checks every invariant of the raw instance and lists all violations.
pub fn validate_instance<T: Scalar>(raw: &RawInstance<T>) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let idx = validate_substrate(&raw.substrate, &mut rep);
    let mut seen = HashSet::new();
    for req in &raw.requests {
        if !seen.insert(req.id.as_str()) {
            rep.push(IssueKind::DuplicateId, format!("request {}", req.id), "request id repeated");
        }
        validate_request(req, &idx, &mut rep);
    }
    rep
}

fn validate_substrate<'a, T: Scalar>(
    s: &'a RawSubstrate<T>,
    rep: &mut ValidationReport,
) -> SubstrateIndex<'a, T> {
    let mut idx = SubstrateIndex {
        nodes: BTreeSet::new(),
        node_caps: HashMap::new(),
        edges: HashMap::new(),
        types: BTreeSet::new(),
    };
    for n in &s.nodes {
        let loc = format!("substrate node {}", n.id);
        if !idx.nodes.insert(n.id.as_str()) {
            rep.push(IssueKind::DuplicateId, &loc, "node id repeated");
        }
        for t in &n.types {
            if idx.node_caps.insert((t.ty.as_str(), n.id.as_str()), t.capacity).is_some() {
                rep.push(IssueKind::DuplicateId, &loc, format!("type {} repeated", t.ty));
            }
            idx.types.insert(t.ty.as_str());
            if !(finite(t.capacity) && t.capacity > T::zero()) {
                rep.push(
                    IssueKind::NonPositiveCapacity,
                    &loc,
                    format!("capacity of type {} must be positive", t.ty),
                );
            }
            if !(finite(t.cost) && t.cost >= T::zero()) {
                rep.push(IssueKind::NegativeCost, &loc, format!("cost of type {} must be >= 0", t.ty));
            }
        }
    }
    for e in &s.edges {
        let loc = format!("substrate edge {}->{}", e.tail, e.head);
        for end in [&e.tail, &e.head] {
            if !idx.nodes.contains(end.as_str()) {
                rep.push(IssueKind::UnknownId, &loc, format!("unknown node {end}"));
            }
        }
        if e.tail == e.head {
            rep.push(IssueKind::SelfLoop, &loc, "self-loops are not allowed");
        }
        if idx.edges.insert((e.tail.as_str(), e.head.as_str()), e.capacity).is_some() {
            rep.push(IssueKind::DuplicateId, &loc, "edge repeated");
        }
        if !(finite(e.capacity) && e.capacity > T::zero()) {
            rep.push(IssueKind::NonPositiveCapacity, &loc, "capacity must be positive");
        }
        if !(finite(e.cost) && e.cost >= T::zero()) {
            rep.push(IssueKind::NegativeCost, &loc, "cost must be >= 0");
        }
    }
    idx
}

fn validate_request<T: Scalar>(
    r: &RawRequest<T>,
    s: &SubstrateIndex<'_, T>,
    rep: &mut ValidationReport,
) {
    let rloc = format!("request {}", r.id);
    if !(finite(r.profit) && r.profit > T::zero()) {
        rep.push(IssueKind::NonPositiveProfit, &rloc, "profit must be positive");
    }
    if r.nodes.is_empty() {
        rep.push(IssueKind::EmptyRequest, &rloc, "request has no nodes");
        return;
    }
    let mut ids = BTreeSet::new();
    for n in &r.nodes {
        let loc = format!("{rloc} node {}", n.id);
        if !ids.insert(n.id.as_str()) {
            rep.push(IssueKind::DuplicateId, &loc, "node id repeated");
        }
        if !(finite(n.demand) && n.demand >= T::zero()) {
            rep.push(IssueKind::NegativeDemand, &loc, "demand must be >= 0");
        }
        if !s.types.contains(n.ty.as_str()) {
            rep.push(IssueKind::UnknownId, &loc, format!("no substrate node offers type {}", n.ty));
        }
        let allowed: Vec<&str> = match &n.allowed_nodes {
            Some(list) => {
                let mut uniq = BTreeSet::new();
                for u in list {
                    if !uniq.insert(u.as_str()) {
                        rep.push(IssueKind::DuplicateId, &loc, format!("allowed node {u} repeated"));
                    }
                    if !s.nodes.contains(u.as_str()) {
                        rep.push(IssueKind::UnknownId, &loc, format!("unknown allowed node {u}"));
                    } else {
                        match s.node_caps.get(&(n.ty.as_str(), u.as_str())) {
                            None => rep.push(
                                IssueKind::UnsupportedType,
                                &loc,
                                format!("allowed node {u} does not offer type {}", n.ty),
                            ),
                            Some(&cap) if cap < n.demand => rep.push(
                                IssueKind::CapacityFilter,
                                &loc,
                                format!("allowed node {u} has capacity {cap} < demand {}", n.demand),
                            ),
                            _ => {}
                        }
                    }
                }
                uniq.into_iter().collect()
            }
            None => s
                .node_caps
                .iter()
                .filter(|(&(t, _), &cap)| t == n.ty && cap >= n.demand)
                .map(|(&(_, u), _)| u)
                .collect(),
        };
        if allowed.is_empty() {
            rep.push(IssueKind::EmptyAllowedSet, &loc, "no allowed substrate node");
        }
    }
    let mut edges = BTreeSet::new();
    for e in &r.edges {
        let loc = format!("{rloc} edge {}->{}", e.tail, e.head);
        for end in [&e.tail, &e.head] {
            if !ids.contains(end.as_str()) {
                rep.push(IssueKind::UnknownId, &loc, format!("unknown request node {end}"));
            }
        }
        if e.tail == e.head {
            rep.push(IssueKind::SelfLoop, &loc, "self-loops are not allowed");
        }
        if !edges.insert((e.tail.as_str(), e.head.as_str())) {
            rep.push(IssueKind::DuplicateId, &loc, "edge repeated");
        }
        if !(finite(e.demand) && e.demand >= T::zero()) {
            rep.push(IssueKind::NegativeDemand, &loc, "demand must be >= 0");
        }
        let count = match &e.allowed_edges {
            Some(list) => {
                let mut uniq = BTreeSet::new();
                for (u, v) in list {
                    if !uniq.insert((u.as_str(), v.as_str())) {
                        rep.push(IssueKind::DuplicateId, &loc, format!("allowed edge {u}->{v} repeated"));
                    }
                    match s.edges.get(&(u.as_str(), v.as_str())) {
                        None => rep.push(
                            IssueKind::UnknownId,
                            &loc,
                            format!("unknown allowed edge {u}->{v}"),
                        ),
                        Some(&cap) if cap < e.demand => rep.push(
                            IssueKind::CapacityFilter,
                            &loc,
                            format!("allowed edge {u}->{v} has capacity {cap} < demand {}", e.demand),
                        ),
                        _ => {}
                    }
                }
                uniq.len()
            }
            None => s.edges.values().filter(|&&cap| cap >= e.demand).count(),
        };
        if count == 0 {
            rep.push(IssueKind::EmptyAllowedSet, &loc, "no allowed substrate edge");
        }
    }
    // weak connectivity over the known endpoints
    let names: Vec<&str> = ids.iter().copied().collect();
    let pos: HashMap<&str, usize> = names.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    let mut adj = vec![Vec::new(); names.len()];
    for e in &r.edges {
        if let (Some(&a), Some(&b)) = (pos.get(e.tail.as_str()), pos.get(e.head.as_str())) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; names.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(a) = stack.pop() {
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        rep.push(
            IssueKind::Disconnected,
            &rloc,
            format!("node {} is not connected to {}", names[k], names[0]),
        );
    }
}

impl<T: Scalar> RawInstance<T> {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Validates and converts into the dense indexed representation.
    pub fn build(&self) -> Result<Instance<T>, ValidationReport> {
        let rep = validate_instance(self);
        if !rep.passed() {
            return Err(rep);
        }
        let substrate = build_substrate(&self.substrate);
        let requests = self
            .requests
            .iter()
            .map(|r| build_request(r, &substrate))
            .collect();
        Ok(Instance {
            substrate,
            requests,
        })
    }
}

fn build_substrate<T: Scalar>(raw: &RawSubstrate<T>) -> SubstrateGraph<T> {
    let mut node_ids: Vec<String> = raw.nodes.iter().map(|n| n.id.clone()).collect();
    node_ids.sort();
    let node_pos = |id: &str| SNode(node_ids.binary_search_by(|n| n.as_str().cmp(id)).unwrap());
    let type_ids: Vec<String> = raw
        .nodes
        .iter()
        .flat_map(|n| n.types.iter().map(|t| t.ty.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let type_pos = |id: &str| TypeIdx(type_ids.binary_search_by(|n| n.as_str().cmp(id)).unwrap());

    let mut res: BTreeMap<(TypeIdx, SNode), (T, T)> = BTreeMap::new();
    for n in &raw.nodes {
        for t in &n.types {
            res.insert((type_pos(&t.ty), node_pos(&n.id)), (t.capacity, t.cost));
        }
    }
    let mut edges: Vec<((SNode, SNode), T, T)> = raw
        .edges
        .iter()
        .map(|e| ((node_pos(&e.tail), node_pos(&e.head)), e.capacity, e.cost))
        .collect();
    edges.sort_by_key(|e| e.0);

    let n = node_ids.len();
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    let mut edge_index = HashMap::new();
    for (k, &((u, v), _, _)) in edges.iter().enumerate() {
        out_edges[u.0].push(SEdge(k));
        in_edges[v.0].push(SEdge(k));
        edge_index.insert((u, v), SEdge(k));
    }
    let mut typed_nodes = vec![Vec::new(); type_ids.len()];
    for &(t, u) in res.keys() {
        typed_nodes[t.0].push(u);
    }
    let node_resources: Vec<(TypeIdx, SNode)> = res.keys().copied().collect();
    let node_res_index = node_resources
        .iter()
        .enumerate()
        .map(|(k, &key)| (key, k))
        .collect();
    SubstrateGraph {
        node_res_capacity: res.values().map(|v| v.0).collect(),
        node_res_cost: res.values().map(|v| v.1).collect(),
        node_resources,
        node_res_index,
        edge_capacity: edges.iter().map(|e| e.1).collect(),
        edge_cost: edges.iter().map(|e| e.2).collect(),
        edges: edges.iter().map(|e| e.0).collect(),
        edge_index,
        out_edges,
        in_edges,
        typed_nodes,
        node_ids,
        type_ids,
    }
}

fn build_request<T: Scalar>(raw: &RawRequest<T>, s: &SubstrateGraph<T>) -> Request<T> {
    let mut nodes: Vec<&RawRequestNode<T>> = raw.nodes.iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let node_ids: Vec<String> = nodes.iter().map(|n| n.id.clone()).collect();
    let vpos = |id: &str| VNode(node_ids.binary_search_by(|n| n.as_str().cmp(id)).unwrap());

    let mut node_type = Vec::new();
    let mut node_demand = Vec::new();
    let mut allowed_nodes = Vec::new();
    let mut allowed_node_mask = Vec::new();
    for n in &nodes {
        let t = s.type_index(&n.ty).unwrap();
        let mut allowed: Vec<SNode> = match &n.allowed_nodes {
            Some(list) => list.iter().map(|u| s.node_index(u).unwrap()).collect(),
            None => s
                .typed_nodes(t)
                .iter()
                .copied()
                .filter(|&u| s.capacity(s.node_resource(t, u).unwrap()) >= n.demand)
                .collect(),
        };
        allowed.sort();
        allowed.dedup();
        let mut mask = vec![false; s.num_nodes()];
        for u in &allowed {
            mask[u.0] = true;
        }
        node_type.push(t);
        node_demand.push(n.demand);
        allowed_nodes.push(allowed);
        allowed_node_mask.push(mask);
    }

    let mut edges: Vec<((VNode, VNode), &RawRequestEdge<T>)> = raw
        .edges
        .iter()
        .map(|e| ((vpos(&e.tail), vpos(&e.head)), e))
        .collect();
    edges.sort_by_key(|e| e.0);
    let mut out_edges = vec![Vec::new(); node_ids.len()];
    let mut in_edges = vec![Vec::new(); node_ids.len()];
    let mut allowed_edges = Vec::new();
    let mut allowed_edge_mask = Vec::new();
    for (k, ((i, j), e)) in edges.iter().enumerate() {
        out_edges[i.0].push(VEdge(k));
        in_edges[j.0].push(VEdge(k));
        let mut allowed: Vec<SEdge> = match &e.allowed_edges {
            Some(list) => list
                .iter()
                .map(|(u, v)| {
                    s.edge_between(s.node_index(u).unwrap(), s.node_index(v).unwrap())
                        .unwrap()
                })
                .collect(),
            None => s
                .edge_indices()
                .filter(|&se| s.capacity(s.edge_resource(se)) >= e.demand)
                .collect(),
        };
        allowed.sort();
        allowed.dedup();
        let mut mask = vec![false; s.num_edges()];
        for se in &allowed {
            mask[se.0] = true;
        }
        allowed_edges.push(allowed);
        allowed_edge_mask.push(mask);
    }
    Request {
        id: raw.id.clone(),
        profit: raw.profit,
        node_ids,
        node_type,
        node_demand,
        allowed_nodes,
        allowed_node_mask,
        edge_demand: edges.iter().map(|e| e.1.demand).collect(),
        edges: edges.iter().map(|e| e.0).collect(),
        allowed_edges,
        allowed_edge_mask,
        out_edges,
        in_edges,
    }
}
