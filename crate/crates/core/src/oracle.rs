//! Exact machinery for tiny instances: all valid mappings and the enumerative LP/IP over them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{LpModel, LpSolver, LpStatus, Objective, Relation, Sense};
use crate::model::{
    allocations_unchecked, check_valid_mapping, Instance, Request, SEdge, SNode, SubstrateGraph,
    VEdge, ValidMapping,
};
use crate::scalar::{Scalar, FEASIBILITY_TOL};

pub const DEFAULT_MAPPING_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEnumeration {
    pub request: String,
    pub mappings: Vec<ValidMapping>,
    /// The cap was hit and `mappings` is partial.
    pub truncated: bool,
}

/// Simple paths from `from` to `to` over the allowed edges of `e`, in DFS order.
fn simple_paths<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    e: VEdge,
    from: SNode,
    to: SNode,
) -> Vec<Vec<SEdge>> {
    #[allow(clippy::too_many_arguments)]
    fn dfs<T: Scalar>(
        s: &SubstrateGraph<T>,
        r: &Request<T>,
        e: VEdge,
        at: SNode,
        to: SNode,
        visited: &mut Vec<bool>,
        path: &mut Vec<SEdge>,
        out: &mut Vec<Vec<SEdge>>,
    ) {
        if at == to {
            out.push(path.clone());
            return;
        }
        for &se in s.out_edges(at) {
            let (_, b) = s.edge(se);
            if visited[b.0] || !r.is_allowed_edge(e, se) {
                continue;
            }
            visited[b.0] = true;
            path.push(se);
            dfs(s, r, e, b, to, visited, path, out);
            path.pop();
            visited[b.0] = false;
        }
    }
    let mut visited = vec![false; substrate.num_nodes()];
    visited[from.0] = true;
    let mut out = Vec::new();
    dfs(substrate, request, e, from, to, &mut visited, &mut Vec::new(), &mut out);
    out
}

/// Every valid mapping of `request` with simple paths, up to `cap` of them.
pub fn enumerate_valid_mappings<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    cap: usize,
) -> MappingEnumeration {
    let mut result = MappingEnumeration {
        request: request.id().to_string(),
        mappings: Vec::new(),
        truncated: false,
    };
    let n = request.num_nodes();
    let mut cache: HashMap<(usize, SNode, SNode), Vec<Vec<SEdge>>> = HashMap::new();
    let mut digits = vec![0usize; n];
    'placements: loop {
        let node_map: Vec<SNode> = request
            .nodes()
            .map(|i| request.allowed_nodes(i)[digits[i.0]])
            .collect();
        let options: Vec<&Vec<Vec<SEdge>>> = request
            .edge_indices()
            .map(|e| {
                let (i, j) = request.edge(e);
                let key = (e.0, node_map[i.0], node_map[j.0]);
                cache
                    .entry(key)
                    .or_insert_with(|| simple_paths(substrate, request, e, key.1, key.2));
                key
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|key| &cache[&key])
            .collect();
        if options.iter().all(|o| !o.is_empty()) {
            let mut choice = vec![0usize; options.len()];
            loop {
                if result.mappings.len() >= cap {
                    result.truncated = true;
                    break 'placements;
                }
                let m = ValidMapping {
                    node_map: node_map.clone(),
                    edge_map: choice
                        .iter()
                        .zip(&options)
                        .map(|(&c, o)| o[c].clone())
                        .collect(),
                };
                debug_assert!(check_valid_mapping(substrate, request, &m).is_ok());
                result.mappings.push(m);
                if !advance(&mut choice, |k| options[k].len()) {
                    break;
                }
            }
        }
        if !advance(&mut digits, |k| request.allowed_nodes(crate::model::VNode(k)).len()) {
            break;
        }
    }
    result
}

/// Mixed-radix increment, last position fastest; false after the final combination.
fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix(k) {
            return true;
        }
        digits[k] = 0;
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relaxation {
    Lp,
    Ip,
}

impl std::str::FromStr for Relaxation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lp" => Ok(Relaxation::Lp),
            "ip" => Ok(Relaxation::Ip),
            other => Err(format!("unknown relaxation {other:?}, expected lp or ip")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration of request {0} was truncated")]
    Truncated(String),
    #[error("expected one enumeration per request")]
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerativeSolution {
    pub status: LpStatus,
    pub optimum: f64,
    /// `weights[r][k]`: value of mapping `k` of request `r`.
    pub weights: Vec<Vec<f64>>,
}

impl EnumerativeSolution {
    /// Chosen mapping per request in an integral solution.
    pub fn selection(&self) -> Vec<Option<usize>> {
        self.weights
            .iter()
            .map(|w| w.iter().position(|&f| f > 0.5))
            .collect()
    }
}

struct Table {
    /// `value[r][k]`: profit or cost of mapping `k` of request `r`.
    value: Vec<Vec<f64>>,
    /// `alloc[r][k]`: sparse allocations `(resource, amount)`.
    alloc: Vec<Vec<Vec<(usize, f64)>>>,
}

fn table<T: Scalar>(inst: &Instance<T>, enums: &[MappingEnumeration], objective: Objective) -> Table {
    let s = &inst.substrate;
    let mut value = Vec::new();
    let mut alloc = Vec::new();
    for (req, en) in inst.requests.iter().zip(enums) {
        let mut vr = Vec::new();
        let mut ar = Vec::new();
        for m in &en.mappings {
            let a = allocations_unchecked(s, req, m);
            let sparse: Vec<(usize, f64)> = a
                .0
                .iter()
                .enumerate()
                .filter(|p| *p.1 > T::zero())
                .map(|(q, v)| (q, v.as_f64()))
                .collect();
            vr.push(match objective {
                Objective::Profit => req.profit().as_f64(),
                Objective::Cost => sparse.iter().map(|&(q, v)| s.cost(crate::model::ResourceId(q)).as_f64() * v).sum(),
            });
            ar.push(sparse);
        }
        value.push(vr);
        alloc.push(ar);
    }
    Table { value, alloc }
}

/// Optimum of the enumerative formulation over complete enumerations.
pub fn solve_enumerative<T: Scalar>(
    inst: &Instance<T>,
    enums: &[MappingEnumeration],
    objective: Objective,
    relaxation: Relaxation,
    solver: &dyn LpSolver,
) -> Result<EnumerativeSolution, OracleError> {
    if enums.len() != inst.requests.len() {
        return Err(OracleError::Mismatch);
    }
    if let Some(e) = enums.iter().find(|e| e.truncated) {
        return Err(OracleError::Truncated(e.request.clone()));
    }
    let t = table(inst, enums, objective);
    let caps: Vec<f64> = inst
        .substrate
        .resources()
        .map(|q| inst.substrate.capacity(q).as_f64())
        .collect();
    Ok(match relaxation {
        Relaxation::Lp => solve_lp(&t, &caps, objective, solver),
        Relaxation::Ip => solve_ip(&t, &caps, objective),
    })
}

fn solve_lp(t: &Table, caps: &[f64], objective: Objective, solver: &dyn LpSolver) -> EnumerativeSolution {
    let sense = match objective {
        Objective::Profit => Sense::Maximize,
        Objective::Cost => Sense::Minimize,
    };
    let mut model = LpModel::new(sense);
    let mut by_res: Vec<Vec<(crate::lp::VarId, f64)>> = vec![Vec::new(); caps.len()];
    let mut vars = Vec::new();
    for (r, vr) in t.value.iter().enumerate() {
        let ids: Vec<_> = vr
            .iter()
            .enumerate()
            .map(|(k, &v)| model.add_var(format!("f_r{r}_k{k}"), 0.0, 1.0, v))
            .collect();
        for (k, &id) in ids.iter().enumerate() {
            for &(q, a) in &t.alloc[r][k] {
                by_res[q].push((id, a));
            }
        }
        let (rel, rhs) = match objective {
            Objective::Profit => (Relation::Le, 1.0),
            Objective::Cost => (Relation::Eq, 1.0),
        };
        model.add_constraint(
            format!("choice_r{r}"),
            ids.iter().map(|&v| (v, 1.0)).collect(),
            rel,
            rhs,
        );
        vars.push(ids);
    }
    for (q, terms) in by_res.into_iter().enumerate() {
        if !terms.is_empty() {
            model.add_constraint(format!("cap_q{q}"), terms, Relation::Le, caps[q]);
        }
    }
    let sol = solver.solve(&model);
    let weights = if sol.is_optimal() {
        vars.iter()
            .map(|ids| ids.iter().map(|&v| sol.value(v)).collect())
            .collect()
    } else {
        Vec::new()
    };
    EnumerativeSolution {
        status: sol.status,
        optimum: sol.objective,
        weights,
    }
}

fn solve_ip(t: &Table, caps: &[f64], objective: Objective) -> EnumerativeSolution {
    struct Search<'a> {
        t: &'a Table,
        caps: &'a [f64],
        objective: Objective,
        load: Vec<f64>,
        current: Vec<Option<usize>>,
        best: Option<(f64, Vec<Option<usize>>)>,
        /// Best achievable contribution of requests `r..`.
        tail_bound: Vec<f64>,
    }

    impl Search<'_> {
        fn better(&self, v: f64) -> bool {
            match (&self.best, self.objective) {
                (None, _) => true,
                (Some((b, _)), Objective::Profit) => v > *b + FEASIBILITY_TOL,
                (Some((b, _)), Objective::Cost) => v < *b - FEASIBILITY_TOL,
            }
        }

        fn fits(&self, alloc: &[(usize, f64)]) -> bool {
            alloc
                .iter()
                .all(|&(q, a)| self.load[q] + a <= self.caps[q] + FEASIBILITY_TOL)
        }

        fn run(&mut self, r: usize, value: f64) {
            if r == self.t.value.len() {
                if self.better(value) {
                    self.best = Some((value, self.current.clone()));
                }
                return;
            }
            if !self.better(value + self.tail_bound[r]) && self.best.is_some() {
                return;
            }
            let mut order: Vec<usize> = (0..self.t.value[r].len()).collect();
            match self.objective {
                Objective::Profit => {}
                Objective::Cost => order.sort_by(|&a, &b| self.t.value[r][a].total_cmp(&self.t.value[r][b])),
            }
            for k in order {
                let alloc = &self.t.alloc[r][k];
                if !self.fits(alloc) {
                    continue;
                }
                for &(q, a) in alloc {
                    self.load[q] += a;
                }
                self.current[r] = Some(k);
                self.run(r + 1, value + self.t.value[r][k]);
                self.current[r] = None;
                for &(q, a) in alloc {
                    self.load[q] -= a;
                }
            }
            if self.objective == Objective::Profit {
                self.run(r + 1, value);
            }
        }
    }

    let n = t.value.len();
    let mut tail_bound = vec![0.0; n + 1];
    for r in (0..n).rev() {
        let best_here = match objective {
            Objective::Profit => t.value[r].iter().copied().fold(0.0, f64::max),
            Objective::Cost => t.value[r].iter().copied().fold(f64::INFINITY, f64::min),
        };
        tail_bound[r] = tail_bound[r + 1] + best_here;
    }
    let mut s = Search {
        t,
        caps,
        objective,
        load: vec![0.0; caps.len()],
        current: vec![None; n],
        best: None,
        tail_bound,
    };
    s.run(0, 0.0);
    match s.best {
        Some((v, sel)) => EnumerativeSolution {
            status: LpStatus::Optimal,
            optimum: v,
            weights: sel
                .iter()
                .enumerate()
                .map(|(r, c)| {
                    (0..t.value[r].len())
                        .map(|k| if *c == Some(k) { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect(),
        },
        None => EnumerativeSolution {
            status: LpStatus::Infeasible,
            optimum: f64::NAN,
            weights: Vec::new(),
        },
    }
}
