use crate::extraction::LabeledExtractionOrder;
use crate::model::{Instance, Request, ResourceId, SEdge, SNode, SubstrateGraph, VNode};
use crate::scalar::Scalar;

use super::mcf::{add_flow_block, add_node_loads, finish_model, sense_of, FlowBlock};
use super::space::LabelSpace;
use super::{LpError, LpModel, Objective, Relation, VarId};

/// Default cap on the number of variables of a novel model.
pub const DEFAULT_VAR_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct NovelRequestIndex {
    pub order: LabeledExtractionOrder,
    pub x: VarId,
    /// `y[i]`: `(u, var)` for each allowed `u`.
    pub y: Vec<Vec<(SNode, VarId)>>,
    /// Global load variables, ascending by resource.
    pub loads: Vec<(ResourceId, VarId)>,
    /// Mapping space of each request edge's labels.
    pub edge_spaces: Vec<LabelSpace>,
    /// `sub[e][m]`: flow block of edge `e` under label mapping `m`.
    pub sub: Vec<Vec<FlowBlock>>,
    /// `bag_spaces[i][b]`: mapping space of the labels of bag `b` of node `i`.
    pub bag_spaces: Vec<Vec<LabelSpace>>,
    /// `gamma[i][b][k][a]`: bag variable for the `k`-th allowed node of `i` and assignment `a`.
    pub gamma: Vec<Vec<Vec<Vec<VarId>>>>,
}

impl NovelRequestIndex {
    pub fn y(&self, i: VNode, u: SNode) -> Option<VarId> {
        let list = &self.y[i.0];
        list.binary_search_by(|p| p.0.cmp(&u)).ok().map(|p| list[p].1)
    }

    pub fn gamma(&self, req_allowed: &[SNode], i: VNode, b: usize, u: SNode, a: usize) -> VarId {
        let k = req_allowed.binary_search(&u).expect("allowed node");
        self.gamma[i.0][b][k][a]
    }

    pub fn load(&self, r: ResourceId) -> Option<VarId> {
        self.loads
            .binary_search_by(|p| p.0.cmp(&r))
            .ok()
            .map(|p| self.loads[p].1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NovelVariableIndex {
    pub requests: Vec<NovelRequestIndex>,
}

fn request_spaces<T: Scalar>(
    req: &Request<T>,
    order: &LabeledExtractionOrder,
) -> (Vec<LabelSpace>, Vec<Vec<LabelSpace>>) {
    let to_nodes = |ls: &[usize]| ls.iter().map(|&l| VNode(l)).collect::<Vec<_>>();
    let edge_spaces = order
        .labels
        .iter()
        .map(|ls| LabelSpace::new(&to_nodes(ls), req))
        .collect();
    let bag_spaces = order
        .bags
        .iter()
        .map(|bags| {
            bags.iter()
                .map(|b| LabelSpace::new(&to_nodes(&b.labels), req))
                .collect()
        })
        .collect();
    (edge_spaces, bag_spaces)
}

/// Number of variables `build_novel` creates for one request.
pub fn novel_variable_count<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    req: &Request<T>,
    order: &LabeledExtractionOrder,
) -> usize {
    let (edge_spaces, bag_spaces) = request_spaces(req, order);
    let mut n = 1 + req.touched_resources(substrate).len();
    n += req.nodes().map(|i| req.allowed_nodes(i).len()).sum::<usize>();
    for e in req.edge_indices() {
        let (i, j) = req.edge(e);
        let block = 1
            + req.allowed_nodes(i).len()
            + req.allowed_nodes(j).len()
            + 2 * req.allowed_edges(e).len();
        n += edge_spaces[e.0].len() * block;
    }
    for i in req.nodes() {
        for sp in &bag_spaces[i.0] {
            n += req.allowed_nodes(i).len() * sp.len();
        }
    }
    n
}

/// Decomposable formulation built from one labeled extraction order per request.
///
/// Fails when the model would exceed `var_budget` variables.
pub fn build_novel<T: Scalar>(
    inst: &Instance<T>,
    orders: &[LabeledExtractionOrder],
    objective: Objective,
    var_budget: usize,
) -> Result<(LpModel, NovelVariableIndex), LpError> {
    assert_eq!(orders.len(), inst.requests.len(), "one order per request");
    let s = &inst.substrate;
    let required: usize = inst
        .requests
        .iter()
        .zip(orders)
        .map(|(r, o)| novel_variable_count(s, r, o))
        .sum();
    if required > var_budget {
        return Err(LpError::BudgetExceeded {
            required,
            budget: var_budget,
        });
    }
    let mut model = LpModel::new(sense_of(objective));
    let mut requests = Vec::with_capacity(inst.requests.len());
    for (r, (req, order)) in inst.requests.iter().zip(orders).enumerate() {
        requests.push(add_request(&mut model, s, req, order, r));
    }
    let per_request: Vec<_> = requests.iter().map(|ix| (ix.x, ix.loads.clone())).collect();
    finish_model(&mut model, inst, objective, &per_request);
    Ok((model, NovelVariableIndex { requests }))
}

fn add_request<T: Scalar>(
    model: &mut LpModel,
    s: &SubstrateGraph<T>,
    req: &Request<T>,
    order: &LabeledExtractionOrder,
    r: usize,
) -> NovelRequestIndex {
    let x_ord = &order.order;
    let (edge_spaces, bag_spaces) = request_spaces(req, order);
    let tag = format!("_r{r}");
    let x = model.add_var(format!("x{tag}"), 0.0, 1.0, 0.0);
    let y: Vec<Vec<(SNode, VarId)>> = req
        .nodes()
        .map(|i| {
            req.allowed_nodes(i)
                .iter()
                .map(|&u| (u, model.add_var(format!("y{tag}_i{}_u{}", i.0, u.0), 0.0, 1.0, 0.0)))
                .collect()
        })
        .collect();
    let gy = |i: VNode, u: SNode| -> Option<VarId> {
        let list = &y[i.0];
        list.binary_search_by(|p| p.0.cmp(&u)).ok().map(|p| list[p].1)
    };

    // one flow block per edge and label mapping
    let mut sub: Vec<Vec<FlowBlock>> = Vec::with_capacity(req.num_edges());
    for e in req.edge_indices() {
        let (i, j) = req.edge(e);
        let oe = x_ord.edges[e.0];
        let x_head = VNode(oe.head);
        let space = &edge_spaces[e.0];
        let mut blocks = Vec::with_capacity(space.len());
        for m in 0..space.len() {
            let btag = format!("{tag}_e{}_m{m}", e.0);
            let block = add_flow_block(model, s, req, &[i, j], &[e], &btag);
            if let Some(p) = space.position(x_head) {
                let fixed = space.assignment(m)[p];
                for &(u, v) in block.y_list(x_head) {
                    if u != fixed {
                        model.set_upper(v, 0.0);
                    }
                }
            }
            blocks.push(block);
        }
        sub.push(blocks);
    }

    // bag variables
    let gamma: Vec<Vec<Vec<Vec<VarId>>>> = req
        .nodes()
        .map(|i| {
            bag_spaces[i.0]
                .iter()
                .enumerate()
                .map(|(b, sp)| {
                    req.allowed_nodes(i)
                        .iter()
                        .map(|&u| {
                            (0..sp.len())
                                .map(|a| {
                                    model.add_var(
                                        format!("g{tag}_i{}_b{b}_u{}_a{a}", i.0, u.0),
                                        0.0,
                                        1.0,
                                        0.0,
                                    )
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    // x = Σ_u y at the root
    let root = VNode(x_ord.root);
    let mut terms: Vec<(VarId, f64)> = y[root.0].iter().map(|&(_, v)| (v, 1.0)).collect();
    terms.push((x, -1.0));
    model.add_constraint(format!("root{tag}"), terms, Relation::Eq, 0.0);

    for i in req.nodes() {
        for (k, &u) in req.allowed_nodes(i).iter().enumerate() {
            let yv = gy(i, u).expect("allowed");
            // global placement split over the label mappings of each incident edge
            for &e in req.out_edges(i).iter().chain(req.in_edges(i)) {
                let mut terms = vec![(yv, 1.0)];
                for block in &sub[e.0] {
                    terms.push((block.y(i, u).expect("allowed"), -1.0));
                }
                model.add_constraint(
                    format!("split{tag}_i{}_u{}_e{}", i.0, u.0, e.0),
                    terms,
                    Relation::Eq,
                    0.0,
                );
            }
            for (b, bag) in order.bags[i.0].iter().enumerate() {
                let bsp = &bag_spaces[i.0][b];
                let gv = &gamma[i.0][b][k];
                // bag to outgoing edge coupling
                for &e in &bag.edges {
                    let esp = &edge_spaces[e];
                    let mut rows: Vec<Vec<(VarId, f64)>> = sub[e]
                        .iter()
                        .map(|block| vec![(block.y(i, u).expect("allowed"), 1.0)])
                        .collect();
                    for (a, &g) in gv.iter().enumerate() {
                        rows[esp.restrict_from(bsp, a)].push((g, -1.0));
                    }
                    for (m, terms) in rows.into_iter().enumerate() {
                        model.add_constraint(
                            format!("bag{tag}_i{}_u{}_b{b}_e{e}_m{m}", i.0, u.0),
                            terms,
                            Relation::Eq,
                            0.0,
                        );
                    }
                }
                // incoming edge to bag coupling on shared labels
                for &e in x_ord.in_edges(i.0) {
                    let esp = &edge_spaces[e];
                    let shared: Vec<VNode> = esp
                        .labels
                        .iter()
                        .copied()
                        .filter(|l| bsp.position(*l).is_some())
                        .collect();
                    let csp = LabelSpace::new(&shared, req);
                    let mut rows: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); csp.len()];
                    for (m, block) in sub[e].iter().enumerate() {
                        rows[csp.restrict_from(esp, m)]
                            .push((block.y(i, u).expect("allowed"), 1.0));
                    }
                    for (a, &g) in gv.iter().enumerate() {
                        rows[csp.restrict_from(bsp, a)].push((g, -1.0));
                    }
                    for (m, terms) in rows.into_iter().enumerate() {
                        model.add_constraint(
                            format!("inbag{tag}_i{}_u{}_b{b}_e{e}_m{m}", i.0, u.0),
                            terms,
                            Relation::Eq,
                            0.0,
                        );
                    }
                }
            }
        }
    }

    // loads
    let mut loads = add_node_loads(model, s, req, gy, &tag);
    let mut edges_used: Vec<SEdge> = req
        .edge_indices()
        .flat_map(|e| req.allowed_edges(e).iter().copied())
        .collect();
    edges_used.sort_unstable();
    edges_used.dedup();
    for se in edges_used {
        let res = s.edge_resource(se);
        let a = model.add_var(format!("a{tag}_q{}", res.0), 0.0, f64::INFINITY, 0.0);
        let mut terms = vec![(a, -1.0)];
        for blocks in &sub {
            for block in blocks {
                if let Some(v) = block.edge_load(se) {
                    terms.push((v, 1.0));
                }
            }
        }
        model.add_constraint(format!("eload{tag}_q{}", res.0), terms, Relation::Eq, 0.0);
        loads.push((res, a));
    }
    loads.sort_unstable();

    NovelRequestIndex {
        order: order.clone(),
        x,
        y,
        loads,
        edge_spaces,
        sub,
        bag_spaces,
        gamma,
    }
}
