use crate::model::{Instance, Request, ResourceId, SEdge, SNode, SubstrateGraph, VEdge, VNode};
use crate::scalar::Scalar;

use super::{LpModel, Objective, Relation, Sense, VarId};

/// Multi-commodity flow variables of one request restricted to a node and edge subset:
/// embedding variable `x`, placements `y`, flows `z` and edge loads.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowBlock {
    pub x: VarId,
    pub nodes: Vec<VNode>,
    /// `y[k]`: `(u, var)` for each allowed `u` of `nodes[k]`, ascending by `u`.
    pub y: Vec<Vec<(SNode, VarId)>>,
    pub edges: Vec<VEdge>,
    /// `z[k]`: `(substrate edge, var)` for each allowed edge of `edges[k]`.
    pub z: Vec<Vec<(SEdge, VarId)>>,
    /// Edge load `a^{u,v}` per substrate edge that some block edge may use, ascending.
    pub edge_load: Vec<(SEdge, VarId)>,
}

fn lookup<K: Ord + Copy>(list: &[(K, VarId)], k: K) -> Option<VarId> {
    list.binary_search_by(|p| p.0.cmp(&k)).ok().map(|p| list[p].1)
}

impl FlowBlock {
    pub fn y(&self, i: VNode, u: SNode) -> Option<VarId> {
        let k = self.nodes.iter().position(|&n| n == i)?;
        lookup(&self.y[k], u)
    }

    pub fn y_list(&self, i: VNode) -> &[(SNode, VarId)] {
        let k = self.nodes.iter().position(|&n| n == i).expect("node in block");
        &self.y[k]
    }

    pub fn z(&self, e: VEdge, se: SEdge) -> Option<VarId> {
        let k = self.edges.iter().position(|&f| f == e)?;
        lookup(&self.z[k], se)
    }

    pub fn edge_load(&self, se: SEdge) -> Option<VarId> {
        lookup(&self.edge_load, se)
    }

    /// Every variable of the block.
    pub fn all_vars(&self) -> Vec<VarId> {
        let mut v = vec![self.x];
        v.extend(self.y.iter().flatten().map(|p| p.1));
        v.extend(self.z.iter().flatten().map(|p| p.1));
        v.extend(self.edge_load.iter().map(|p| p.1));
        v
    }
}

/// Adds the flow variables and the node-embedding, flow-conservation and edge-load rows of
/// `request` restricted to `nodes` and `edges`. Disallowed placements and edges get no variable.
pub fn add_flow_block<T: Scalar>(
    model: &mut LpModel,
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    nodes: &[VNode],
    edges: &[VEdge],
    tag: &str,
) -> FlowBlock {
    let x = model.add_var(format!("x{tag}"), 0.0, 1.0, 0.0);
    let y: Vec<Vec<(SNode, VarId)>> = nodes
        .iter()
        .map(|&i| {
            request
                .allowed_nodes(i)
                .iter()
                .map(|&u| (u, model.add_var(format!("y{tag}_i{}_u{}", i.0, u.0), 0.0, 1.0, 0.0)))
                .collect()
        })
        .collect();
    let z: Vec<Vec<(SEdge, VarId)>> = edges
        .iter()
        .map(|&e| {
            request
                .allowed_edges(e)
                .iter()
                .map(|&se| {
                    (
                        se,
                        model.add_var(format!("z{tag}_e{}_s{}", e.0, se.0), 0.0, 1.0, 0.0),
                    )
                })
                .collect()
        })
        .collect();
    let mut used: Vec<SEdge> = edges
        .iter()
        .flat_map(|&e| request.allowed_edges(e).iter().copied())
        .collect();
    used.sort_unstable();
    used.dedup();
    let edge_load: Vec<(SEdge, VarId)> = used
        .into_iter()
        .map(|se| {
            (
                se,
                model.add_var(format!("a{tag}_s{}", se.0), 0.0, f64::INFINITY, 0.0),
            )
        })
        .collect();
    let block = FlowBlock {
        x,
        nodes: nodes.to_vec(),
        y,
        edges: edges.to_vec(),
        z,
        edge_load,
    };

    for (k, &i) in nodes.iter().enumerate() {
        let mut terms: Vec<(VarId, f64)> = block.y[k].iter().map(|&(_, v)| (v, 1.0)).collect();
        terms.push((x, -1.0));
        model.add_constraint(format!("embed{tag}_i{}", i.0), terms, Relation::Eq, 0.0);
    }
    for (k, &e) in edges.iter().enumerate() {
        let (i, j) = request.edge(e);
        for u in substrate.nodes() {
            let mut terms = Vec::new();
            for &se in substrate.out_edges(u) {
                if let Some(v) = lookup(&block.z[k], se) {
                    terms.push((v, 1.0));
                }
            }
            for &se in substrate.in_edges(u) {
                if let Some(v) = lookup(&block.z[k], se) {
                    terms.push((v, -1.0));
                }
            }
            if let Some(v) = block.y(i, u) {
                terms.push((v, -1.0));
            }
            if let Some(v) = block.y(j, u) {
                terms.push((v, 1.0));
            }
            if !terms.is_empty() {
                model.add_constraint(
                    format!("flow{tag}_e{}_u{}", e.0, u.0),
                    terms,
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }
    for &(se, a) in &block.edge_load {
        let mut terms = vec![(a, -1.0)];
        for (k, &e) in edges.iter().enumerate() {
            if let Some(v) = lookup(&block.z[k], se) {
                terms.push((v, request.edge_demand(e).as_f64()));
            }
        }
        model.add_constraint(format!("eload{tag}_s{}", se.0), terms, Relation::Eq, 0.0);
    }
    block
}

#[derive(Clone, Debug, PartialEq)]
pub struct McfRequestIndex {
    pub flow: FlowBlock,
    /// Node load `a^{τ,u}` per touched node resource, ascending.
    pub node_load: Vec<(ResourceId, VarId)>,
}

impl McfRequestIndex {
    pub fn x(&self) -> VarId {
        self.flow.x
    }

    pub fn y(&self, i: VNode, u: SNode) -> Option<VarId> {
        self.flow.y(i, u)
    }

    pub fn z(&self, e: VEdge, se: SEdge) -> Option<VarId> {
        self.flow.z(e, se)
    }

    /// Load variable of resource `r`, if the request can touch it.
    pub fn load<T: Scalar>(&self, substrate: &SubstrateGraph<T>, r: ResourceId) -> Option<VarId> {
        if substrate.is_node_resource(r) {
            lookup(&self.node_load, r)
        } else {
            self.flow
                .edge_load(SEdge(r.0 - substrate.num_node_resources()))
        }
    }

    /// `(resource, var)` for every load variable.
    pub fn loads<T: Scalar>(&self, substrate: &SubstrateGraph<T>) -> Vec<(ResourceId, VarId)> {
        let mut v = self.node_load.clone();
        v.extend(
            self.flow
                .edge_load
                .iter()
                .map(|&(se, a)| (substrate.edge_resource(se), a)),
        );
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McfVariableIndex {
    pub requests: Vec<McfRequestIndex>,
}

/// Adds `a^{τ,u} = Σ d(i)·y^u_i` rows for every node resource the request may touch.
pub(crate) fn add_node_loads<T: Scalar>(
    model: &mut LpModel,
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    y: impl Fn(VNode, SNode) -> Option<VarId>,
    tag: &str,
) -> Vec<(ResourceId, VarId)> {
    let touched: Vec<ResourceId> = request
        .touched_resources(substrate)
        .into_iter()
        .filter(|&r| substrate.is_node_resource(r))
        .collect();
    touched
        .into_iter()
        .map(|r| {
            let a = model.add_var(format!("a{tag}_q{}", r.0), 0.0, f64::INFINITY, 0.0);
            let (ty, u) = match substrate.resource(r) {
                crate::model::Resource::Node { ty, node } => (ty, node),
                crate::model::Resource::Edge(_) => unreachable!(),
            };
            let mut terms = vec![(a, -1.0)];
            for i in request.nodes() {
                if request.node_type(i) == ty {
                    if let Some(v) = y(i, u) {
                        terms.push((v, request.node_demand(i).as_f64()));
                    }
                }
            }
            model.add_constraint(format!("nload{tag}_q{}", r.0), terms, Relation::Eq, 0.0);
            (r, a)
        })
        .collect()
}

/// Capacity rows, objective coefficients and (cost variant) full-embedding rows.
pub(crate) fn finish_model<T: Scalar>(
    model: &mut LpModel,
    inst: &Instance<T>,
    objective: Objective,
    per_request: &[(VarId, Vec<(ResourceId, VarId)>)],
) {
    let s = &inst.substrate;
    let mut by_res: Vec<Vec<VarId>> = vec![Vec::new(); s.num_resources()];
    for (r, (x, loads)) in per_request.iter().enumerate() {
        match objective {
            Objective::Profit => model.set_objective(*x, inst.requests[r].profit().as_f64()),
            Objective::Cost => {
                model.add_constraint(format!("all_r{r}"), vec![(*x, 1.0)], Relation::Eq, 1.0);
                for &(res, a) in loads {
                    model.set_objective(a, s.cost(res).as_f64());
                }
            }
        }
        for &(res, a) in loads {
            by_res[res.0].push(a);
        }
    }
    for res in s.resources() {
        if by_res[res.0].is_empty() {
            continue;
        }
        let terms = by_res[res.0].iter().map(|&a| (a, 1.0)).collect();
        model.add_constraint(
            format!("cap_q{}", res.0),
            terms,
            Relation::Le,
            s.capacity(res).as_f64(),
        );
    }
}

pub(crate) fn sense_of(objective: Objective) -> Sense {
    match objective {
        Objective::Profit => Sense::Maximize,
        Objective::Cost => Sense::Minimize,
    }
}

/// Classic multi-commodity flow relaxation.
pub fn build_mcf<T: Scalar>(inst: &Instance<T>, objective: Objective) -> (LpModel, McfVariableIndex) {
    let s = &inst.substrate;
    let mut model = LpModel::new(sense_of(objective));
    let mut requests = Vec::with_capacity(inst.requests.len());
    for (r, req) in inst.requests.iter().enumerate() {
        let tag = format!("_r{r}");
        let nodes: Vec<VNode> = req.nodes().collect();
        let edges: Vec<VEdge> = req.edge_indices().collect();
        let flow = add_flow_block(&mut model, s, req, &nodes, &edges, &tag);
        let node_load = add_node_loads(&mut model, s, req, |i, u| flow.y(i, u), &tag);
        requests.push(McfRequestIndex { flow, node_load });
    }
    let per_request: Vec<_> = requests.iter().map(|ix| (ix.x(), ix.loads(s))).collect();
    finish_model(&mut model, inst, objective, &per_request);
    (model, McfVariableIndex { requests })
}
