//! Instance generation: named fixtures and seeded random scenarios.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extraction::{
    generate_half_wheel, generate_vc_gadget, is_cactus, ExtractionError, Topology,
};
use crate::model::{
    RawInstance, RawNodeType, RawRequest, RawRequestEdge, RawRequestNode, RawSubstrate,
    RawSubstrateEdge, RawSubstrateNode,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("bad fixture parameter in {0:?}")]
    BadParameter(String),
    #[error(transparent)]
    Graph(#[from] ExtractionError),
}

/// Substrate shape for random scenarios: a bidirected ring plus random bidirected chords.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubstrateModel {
    pub nodes: usize,
    #[serde(default)]
    pub chords: usize,
    #[serde(default = "default_types")]
    pub types: Vec<String>,
    #[serde(default = "default_node_capacity")]
    pub node_capacity: (f64, f64),
    #[serde(default = "default_edge_capacity")]
    pub edge_capacity: (f64, f64),
    #[serde(default = "default_cost")]
    pub cost: (f64, f64),
}

fn default_types() -> Vec<String> {
    vec!["cpu".to_string()]
}

fn default_node_capacity() -> (f64, f64) {
    (2.0, 4.0)
}

fn default_edge_capacity() -> (f64, f64) {
    (2.0, 4.0)
}

fn default_cost() -> (f64, f64) {
    (1.0, 5.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RequestShape {
    Tree,
    Cactus,
    /// Cactus with a few antiparallel copies of existing edges.
    AugmentedCactus,
    /// Spanning tree plus `extra` random edges.
    Connected { extra: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestModel {
    pub shape: RequestShape,
    /// Inclusive range of request sizes.
    pub nodes: (usize, usize),
    /// Allowed placements per node; `None` allows every node of the type.
    #[serde(default)]
    pub allowed_per_node: Option<usize>,
    #[serde(default = "default_demand")]
    pub node_demand: (f64, f64),
    #[serde(default = "default_demand")]
    pub edge_demand: (f64, f64),
    #[serde(default = "default_profit")]
    pub profit: (f64, f64),
}

fn default_demand() -> (f64, f64) {
    (0.5, 1.0)
}

fn default_profit() -> (f64, f64) {
    (1.0, 10.0)
}

/// Everything needed to reproduce a random instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub substrate: SubstrateModel,
    pub request: RequestModel,
    pub count: usize,
    pub seed: u64,
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        // two decimals keep JSON fixtures readable
        (rng.random_range(lo..hi) * 100.0).round() / 100.0
    } else {
        lo
    }
}

/// Random instance following `spec`; identical seeds give identical instances.
pub fn generate_scenario(spec: &ScenarioSpec) -> RawInstance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let substrate = random_substrate(&spec.substrate, &mut rng);
    let requests = (0..spec.count)
        .map(|k| {
            let (lo, hi) = spec.request.nodes;
            let n = rng.random_range(lo..=hi.max(lo));
            let topo = random_topology(spec.request.shape, n, &mut rng);
            random_request(&format!("r{k:02}"), &topo, &substrate, &spec.request, &mut rng)
        })
        .collect();
    RawInstance {
        substrate,
        requests,
    }
}

fn node_name(k: usize) -> String {
    format!("u{k:02}")
}

pub fn random_substrate(model: &SubstrateModel, rng: &mut ChaCha8Rng) -> RawSubstrate<f64> {
    let n = model.nodes.max(2);
    let nodes = (0..n)
        .map(|k| RawSubstrateNode {
            id: node_name(k),
            types: model
                .types
                .iter()
                .map(|t| RawNodeType {
                    ty: t.clone(),
                    capacity: uniform(rng, model.node_capacity),
                    cost: uniform(rng, model.cost),
                })
                .collect(),
        })
        .collect();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for k in 0..n {
        let (a, b) = (k, (k + 1) % n);
        if a != b {
            pairs.insert((a, b));
            pairs.insert((b, a));
        }
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < model.chords && attempts < 100 * (model.chords + 1) {
        attempts += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b && !pairs.contains(&(a, b)) {
            pairs.insert((a, b));
            pairs.insert((b, a));
            added += 1;
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| RawSubstrateEdge {
            tail: node_name(a),
            head: node_name(b),
            capacity: uniform(rng, model.edge_capacity),
            cost: uniform(rng, model.cost),
        })
        .collect();
    RawSubstrate { nodes, edges }
}

fn vnode_name(k: usize) -> String {
    format!("v{k:02}")
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(vnode_name).collect()
}

fn orient(rng: &mut ChaCha8Rng, a: usize, b: usize) -> (usize, usize) {
    if rng.random_bool(0.5) {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn random_tree_topology(n: usize, rng: &mut ChaCha8Rng) -> Topology {
    let edges = (1..n)
        .map(|k| {
            let p = rng.random_range(0..k);
            orient(rng, p, k)
        })
        .collect();
    Topology {
        node_names: names(n),
        edges,
    }
}

/// Grows a cactus by attaching pendant edges or new cycles of length 3 to 5 at random nodes.
pub fn random_cactus_topology(n: usize, rng: &mut ChaCha8Rng) -> Topology {
    let mut edges = Vec::new();
    let mut count = 1;
    while count < n {
        let anchor = rng.random_range(0..count);
        let room = n - count;
        if room >= 2 && rng.random_bool(0.6) {
            let len = rng.random_range(3..=5usize).min(room + 1);
            let mut prev = anchor;
            for _ in 0..len - 1 {
                edges.push(orient(rng, prev, count));
                prev = count;
                count += 1;
            }
            edges.push(orient(rng, prev, anchor));
        } else {
            edges.push(orient(rng, anchor, count));
            count += 1;
        }
    }
    Topology {
        node_names: names(n),
        edges,
    }
}

/// Adds antiparallel copies of up to `k` random edges.
pub fn add_antiparallel_edges(topo: &mut Topology, k: usize, rng: &mut ChaCha8Rng) {
    let existing: BTreeSet<(usize, usize)> = topo.edges.iter().copied().collect();
    let candidates: Vec<(usize, usize)> = topo
        .edges
        .iter()
        .filter(|&&(a, b)| !existing.contains(&(b, a)))
        .map(|&(a, b)| (b, a))
        .collect();
    let k = k.min(candidates.len());
    for idx in sample(rng, candidates.len(), k).into_iter() {
        topo.edges.push(candidates[idx]);
    }
}

pub fn random_connected_topology(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Topology {
    let mut t = random_tree_topology(n, rng);
    let mut present: BTreeSet<(usize, usize)> = t.edges.iter().copied().collect();
    let mut attempts = 0;
    let mut added = 0;
    while added < extra && attempts < 100 * (extra + 1) && n >= 2 {
        attempts += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b && !present.contains(&(a, b)) {
            present.insert((a, b));
            t.edges.push((a, b));
            added += 1;
        }
    }
    t
}

pub fn random_topology(shape: RequestShape, n: usize, rng: &mut ChaCha8Rng) -> Topology {
    match shape {
        RequestShape::Tree => random_tree_topology(n, rng),
        RequestShape::Cactus => random_cactus_topology(n, rng),
        RequestShape::AugmentedCactus => {
            let mut t = random_cactus_topology(n, rng);
            let k = rng.random_range(1..=2);
            add_antiparallel_edges(&mut t, k, rng);
            t
        }
        RequestShape::Connected { extra } => random_connected_topology(n, extra, rng),
    }
}

/// Request on `topo` with random demands, profit and placement restrictions.
pub fn random_request(
    id: &str,
    topo: &Topology,
    substrate: &RawSubstrate<f64>,
    model: &RequestModel,
    rng: &mut ChaCha8Rng,
) -> RawRequest<f64> {
    let types: Vec<String> = substrate
        .nodes
        .iter()
        .flat_map(|n| n.types.iter().map(|t| t.ty.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let nodes = topo
        .node_names
        .iter()
        .map(|name| {
            let ty = types.choose(rng).cloned().unwrap_or_else(|| "cpu".to_string());
            let demand = uniform(rng, model.node_demand);
            let hosts: Vec<&str> = substrate
                .nodes
                .iter()
                .filter(|n| n.types.iter().any(|t| t.ty == ty && t.capacity >= demand))
                .map(|n| n.id.as_str())
                .collect();
            let allowed_nodes = model.allowed_per_node.map(|k| {
                let k = k.clamp(1, hosts.len().max(1));
                let mut picked: Vec<String> = sample(rng, hosts.len(), k.min(hosts.len()))
                    .into_iter()
                    .map(|p| hosts[p].to_string())
                    .collect();
                picked.sort();
                picked
            });
            RawRequestNode {
                id: name.clone(),
                ty,
                demand,
                allowed_nodes,
            }
        })
        .collect();
    let edges = topo
        .edges
        .iter()
        .map(|&(a, b)| RawRequestEdge {
            tail: topo.node_names[a].clone(),
            head: topo.node_names[b].clone(),
            demand: uniform(rng, model.edge_demand),
            allowed_edges: None,
        })
        .collect();
    RawRequest {
        id: id.to_string(),
        profit: uniform(rng, model.profit),
        nodes,
        edges,
    }
}

/// Request with unit demands on type `cpu` and unrestricted placement.
pub fn unit_request(id: &str, topo: &Topology, profit: f64) -> RawRequest<f64> {
    RawRequest {
        id: id.to_string(),
        profit,
        nodes: topo
            .node_names
            .iter()
            .map(|n| RawRequestNode {
                id: n.clone(),
                ty: "cpu".to_string(),
                demand: 1.0,
                allowed_nodes: None,
            })
            .collect(),
        edges: topo
            .edges
            .iter()
            .map(|&(a, b)| RawRequestEdge {
                tail: topo.node_names[a].clone(),
                head: topo.node_names[b].clone(),
                demand: 1.0,
                allowed_edges: None,
            })
            .collect(),
    }
}

/// Bidirected ring on `n` nodes with uniform capacities and unit costs.
pub fn ring_substrate(n: usize, node_cap: f64, edge_cap: f64) -> RawSubstrate<f64> {
    let nodes = (1..=n)
        .map(|k| RawSubstrateNode {
            id: format!("u{k}"),
            types: vec![RawNodeType {
                ty: "cpu".to_string(),
                capacity: node_cap,
                cost: 1.0,
            }],
        })
        .collect();
    let mut edges = Vec::new();
    for k in 1..=n {
        let next = k % n + 1;
        for (a, b) in [(k, next), (next, k)] {
            edges.push(RawSubstrateEdge {
                tail: format!("u{a}"),
                head: format!("u{b}"),
                capacity: edge_cap,
                cost: 1.0,
            });
        }
    }
    RawSubstrate { nodes, edges }
}

fn pair(a: &str, b: &str) -> (String, String) {
    (a.to_string(), b.to_string())
}

/// Directed 6-cycle substrate and a triangle request whose placement and routing restrictions
/// admit a fractional flow solution but no valid mapping.
pub fn fig3() -> RawInstance<f64> {
    let nodes = (1..=6)
        .map(|k| RawSubstrateNode {
            id: format!("u{k}"),
            types: vec![RawNodeType {
                ty: "cpu".to_string(),
                capacity: 10.0,
                cost: 1.0,
            }],
        })
        .collect();
    let edges = (1..=6)
        .map(|k| RawSubstrateEdge {
            tail: format!("u{k}"),
            head: format!("u{}", k % 6 + 1),
            capacity: 10.0,
            cost: 1.0,
        })
        .collect();
    let vnode = |id: &str, allowed: [&str; 2]| RawRequestNode {
        id: id.to_string(),
        ty: "cpu".to_string(),
        demand: 1.0,
        allowed_nodes: Some(allowed.iter().map(|s| s.to_string()).collect()),
    };
    let vedge = |t: &str, h: &str, allowed: Vec<(String, String)>| RawRequestEdge {
        tail: t.to_string(),
        head: h.to_string(),
        demand: 1.0,
        allowed_edges: Some(allowed),
    };
    RawInstance {
        substrate: RawSubstrate { nodes, edges },
        requests: vec![RawRequest {
            id: "r".to_string(),
            profit: 1.0,
            nodes: vec![
                vnode("i", ["u1", "u4"]),
                vnode("j", ["u2", "u5"]),
                vnode("k", ["u3", "u6"]),
            ],
            edges: vec![
                vedge("i", "j", vec![pair("u1", "u2"), pair("u4", "u5")]),
                vedge("j", "k", vec![pair("u2", "u3"), pair("u5", "u6")]),
                vedge("k", "i", vec![pair("u3", "u4"), pair("u6", "u1")]),
            ],
        }],
    }
}

/// Cost of the extra edge in [`fig3_cost_gadget`].
pub const GADGET_EDGE_COST: f64 = 1000.0;

/// [`fig3`] plus an expensive edge `(u3, u1)` allowed for `(k, i)`: exactly one valid mapping.
pub fn fig3_cost_gadget() -> RawInstance<f64> {
    let mut inst = fig3();
    inst.substrate.edges.push(RawSubstrateEdge {
        tail: "u3".to_string(),
        head: "u1".to_string(),
        capacity: 10.0,
        cost: GADGET_EDGE_COST,
    });
    let ki = inst.requests[0]
        .edges
        .iter_mut()
        .find(|e| e.tail == "k")
        .expect("edge k->i");
    ki.allowed_edges.as_mut().unwrap().push(pair("u3", "u1"));
    inst
}

/// The ten-node example with confluences `(a,i)`, `(i,j)`, `(a,l)`, `(b,l)` and `(f,k)`.
pub fn fig4_topology() -> Topology {
    let node_names: Vec<String> = ["a", "b", "c", "d", "f", "g", "i", "j", "k", "l"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let idx = |s: &str| node_names.iter().position(|n| n == s).unwrap();
    let edges = [
        ("a", "i"),
        ("a", "b"),
        ("b", "i"),
        ("b", "d"),
        ("d", "l"),
        ("i", "c"),
        ("c", "j"),
        ("i", "f"),
        ("f", "j"),
        ("f", "g"),
        ("g", "k"),
        ("f", "k"),
        ("f", "l"),
    ]
    .iter()
    .map(|&(a, b)| (idx(a), idx(b)))
    .collect();
    Topology { node_names, edges }
}

/// Service chain: gateway, two load balancers around a cache, firewall and NAT, with return
/// links on the load-balanced segment.
pub fn service_chain_topology() -> Topology {
    let node_names: Vec<String> = ["cache", "fw", "gw", "lb1", "lb2", "nat"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let idx = |s: &str| node_names.iter().position(|n| n == s).unwrap();
    let edges = [
        ("gw", "lb1"),
        ("lb1", "cache"),
        ("cache", "lb2"),
        ("lb1", "lb2"),
        ("lb2", "fw"),
        ("fw", "nat"),
        // return links
        ("cache", "lb1"),
        ("lb2", "cache"),
        ("lb2", "lb1"),
    ]
    .iter()
    .map(|&(a, b)| (idx(a), idx(b)))
    .collect();
    Topology { node_names, edges }
}

/// Logical switch `sw` linked in both directions to `n` VMs.
pub fn virtual_cluster_topology(n: usize) -> Topology {
    let mut node_names = vec!["sw".to_string()];
    node_names.extend((1..=n).map(|k| format!("vm{k:02}")));
    let mut edges = Vec::new();
    for k in 1..=n {
        edges.push((0, k));
        edges.push((k, 0));
    }
    Topology { node_names, edges }
}

/// Named undirected graphs for the vertex-cover gadget, or an explicit `a-b,b-c` edge list.
pub fn parse_small_graph(spec: &str) -> Result<(usize, Vec<(usize, usize)>), ScenarioError> {
    let named: Option<(usize, Vec<(usize, usize)>)> = match spec {
        "edge" => Some((2, vec![(0, 1)])),
        "path3" => Some((3, vec![(0, 1), (1, 2)])),
        "triangle" => Some((3, vec![(0, 1), (1, 2), (0, 2)])),
        "star3" => Some((4, vec![(0, 1), (0, 2), (0, 3)])),
        "c4" => Some((4, vec![(0, 1), (1, 2), (2, 3), (0, 3)])),
        "k4" => Some((4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])),
        "c5" => Some((5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])),
        _ => None,
    };
    if let Some(g) = named {
        return Ok(g);
    }
    let mut edges = Vec::new();
    for part in spec.split(',') {
        let (a, b) = part
            .split_once('-')
            .ok_or_else(|| ScenarioError::BadParameter(spec.to_string()))?;
        let a: usize = a.trim().parse().map_err(|_| ScenarioError::BadParameter(spec.to_string()))?;
        let b: usize = b.trim().parse().map_err(|_| ScenarioError::BadParameter(spec.to_string()))?;
        edges.push((a, b));
    }
    let n = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    Ok((n, edges))
}

fn param(name: &str, value: &str) -> Result<usize, ScenarioError> {
    value
        .parse()
        .map_err(|_| ScenarioError::BadParameter(name.to_string()))
}

/// Built-in fixture by name. Random fixtures (`cactus:n`, `tree:n`) use `seed`.
pub fn fixture(name: &str, seed: u64) -> Result<RawInstance<f64>, ScenarioError> {
    let (kind, arg) = match name.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (name, None),
    };
    let need = || arg.ok_or_else(|| ScenarioError::BadParameter(name.to_string()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let single = |topo: &Topology, ring: usize| RawInstance {
        substrate: ring_substrate(ring, 8.0, 8.0),
        requests: vec![unit_request("r", topo, 1.0)],
    };
    Ok(match kind {
        "fig3" if arg.is_none() => fig3(),
        "fig3-cost-gadget" if arg.is_none() => fig3_cost_gadget(),
        "fig4" if arg.is_none() => single(&fig4_topology(), 4),
        "servicechain" if arg.is_none() => single(&service_chain_topology(), 4),
        "virtualcluster" => {
            let n = param(name, need()?)?;
            single(&virtual_cluster_topology(n), 4)
        }
        "halfwheel" => {
            let n = param(name, need()?)?;
            if n < 3 {
                return Err(ScenarioError::BadParameter(name.to_string()));
            }
            single(&generate_half_wheel(n), 4)
        }
        "vc-gadget" => {
            let (n, edges) = parse_small_graph(need()?)?;
            single(&generate_vc_gadget(n, &edges)?, 4)
        }
        "cactus" => {
            let n = param(name, need()?)?;
            let topo = random_cactus_topology(n.max(1), &mut rng);
            debug_assert!(is_cactus(&topo));
            single(&topo, 4)
        }
        "tree" => {
            let n = param(name, need()?)?;
            single(&random_tree_topology(n.max(1), &mut rng), 4)
        }
        _ => return Err(ScenarioError::UnknownFixture(name.to_string())),
    })
}

pub const FIXTURE_NAMES: &[&str] = &[
    "fig3",
    "fig3-cost-gadget",
    "fig4",
    "halfwheel:n",
    "vc-gadget:<graph>",
    "cactus:n",
    "tree:n",
    "servicechain",
    "virtualcluster:n",
];
