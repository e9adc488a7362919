//! Convex combinations of valid mappings extracted from LP solutions.

mod mcf;
mod novel;
mod path;

pub use mcf::{decompose_mcf_naive, decompose_mcf_tree};
pub use novel::decompose_novel;
pub use path::{find_connectivity_path, Direction};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{LpSolution, McfRequestIndex, NovelRequestIndex, VarId};
use crate::model::{
    allocations_unchecked, check_valid_mapping, MappingRecord, MappingViolation, Request,
    ResourceId, SubstrateGraph, ValidMapping,
};
use crate::scalar::Scalar;

/// Values at or below this count as zero.
pub const EPS: f64 = 1e-9;

/// Tolerance for completeness and allocation checks.
pub const COMPLETENESS_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("request is not a tree")]
    NotATree,
    #[error("flow conservation violated: no positive path for edge {edge} from substrate node {start}")]
    NoFlowPath { edge: usize, start: usize },
    #[error("decomposition stuck at request node {node}")]
    Stuck { node: usize },
    #[error("request node {node} forced onto substrate nodes {first} and {second}")]
    Conflict {
        node: usize,
        first: usize,
        second: usize,
    },
    #[error("no progress after {0} iterations")]
    NoProgress(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvexDecomposition {
    /// `(weight, mapping)` pairs in extraction order.
    pub entries: Vec<(f64, ValidMapping)>,
    pub total_weight: f64,
}

impl ConvexDecomposition {
    pub fn push(&mut self, weight: f64, mapping: ValidMapping) {
        self.total_weight += weight;
        self.entries.push((weight, mapping));
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Weighted allocations `Σ_k f_k·A(m_k)`, indexed by resource.
    pub fn fractional_allocations<T: Scalar>(
        &self,
        substrate: &SubstrateGraph<T>,
        request: &Request<T>,
    ) -> Vec<f64> {
        let mut total = vec![0.0; substrate.num_resources()];
        for (f, m) in &self.entries {
            let a = allocations_unchecked(substrate, request, m);
            for (t, v) in total.iter_mut().zip(a.0) {
                *t += f * v.as_f64();
            }
        }
        total
    }

    pub fn to_records<T: Scalar>(
        &self,
        substrate: &SubstrateGraph<T>,
        request: &Request<T>,
    ) -> Vec<DecompositionEntry> {
        self.entries
            .iter()
            .map(|(f, m)| DecompositionEntry {
                weight: *f,
                mapping: m.to_record(substrate, request),
            })
            .collect()
    }

    pub fn from_records<T: Scalar>(
        records: &[DecompositionEntry],
        substrate: &SubstrateGraph<T>,
        request: &Request<T>,
    ) -> Result<Self, MappingViolation> {
        let mut d = ConvexDecomposition::default();
        for rec in records {
            d.push(rec.weight, rec.mapping.resolve(substrate, request)?);
        }
        Ok(d)
    }
}

/// Serialized entry: `{weight, node_map, edge_map}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub weight: f64,
    #[serde(flatten)]
    pub mapping: MappingRecord,
}

/// The part of an LP solution that describes one request: `x_r` and its load variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSlice {
    pub x: f64,
    /// `(resource, a_r)` for every load variable of the request.
    pub loads: Vec<(ResourceId, f64)>,
}

impl SolutionSlice {
    pub fn from_mcf<T: Scalar>(
        substrate: &SubstrateGraph<T>,
        ix: &McfRequestIndex,
        sol: &LpSolution,
    ) -> Self {
        SolutionSlice {
            x: sol.value(ix.x()),
            loads: ix
                .loads(substrate)
                .into_iter()
                .map(|(r, v)| (r, sol.value(v)))
                .collect(),
        }
    }

    pub fn from_novel(ix: &NovelRequestIndex, sol: &LpSolution) -> Self {
        SolutionSlice {
            x: sol.value(ix.x),
            loads: ix.loads.iter().map(|&(r, v)| (r, sol.value(v))).collect(),
        }
    }

    pub fn load(&self, r: ResourceId) -> f64 {
        self.loads
            .iter()
            .find(|p| p.0 == r)
            .map_or(0.0, |p| p.1)
    }
}

/// Mutable view of LP values; entries at or below [`EPS`] read as zero.
#[derive(Clone, Debug)]
pub struct ResidualState<'a> {
    base: &'a [f64],
    changed: HashMap<VarId, f64>,
}

impl<'a> ResidualState<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        ResidualState {
            base: values,
            changed: HashMap::new(),
        }
    }

    pub fn get(&self, v: VarId) -> f64 {
        let x = self.changed.get(&v).copied().unwrap_or(self.base[v.0]);
        if x <= EPS {
            0.0
        } else {
            x
        }
    }

    pub fn subtract(&mut self, v: VarId, amount: f64) {
        let x = self.get(v) - amount;
        self.changed.insert(v, if x <= EPS { 0.0 } else { x });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub passed: bool,
    /// `|Σ_k f_k − x_r|`.
    pub completeness_gap: f64,
    /// Largest `Σ_k f_k·A(m_k, q) − a_r^q` over resources; negative means slack everywhere.
    pub max_allocation_excess: f64,
    pub min_weight: f64,
    /// `(entry, violation)` for every invalid mapping.
    pub invalid: Vec<(usize, String)>,
}

/// Checks completeness, allocation domination and validity of every mapping.
pub fn verify_decomposition<T: Scalar>(
    substrate: &SubstrateGraph<T>,
    request: &Request<T>,
    d: &ConvexDecomposition,
    slice: &SolutionSlice,
) -> DecompositionReport {
    let invalid: Vec<(usize, String)> = d
        .entries
        .iter()
        .enumerate()
        .filter_map(|(k, (_, m))| {
            check_valid_mapping(substrate, request, m)
                .err()
                .map(|e| (k, e.to_string()))
        })
        .collect();
    let sum: f64 = d.entries.iter().map(|e| e.0).sum();
    let completeness_gap = (sum - slice.x).abs();
    let max_allocation_excess = if invalid.is_empty() {
        d.fractional_allocations(substrate, request)
            .into_iter()
            .enumerate()
            .map(|(r, a)| a - slice.load(ResourceId(r)))
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        f64::INFINITY
    };
    let min_weight = d.entries.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    DecompositionReport {
        passed: invalid.is_empty()
            && completeness_gap <= COMPLETENESS_TOL
            && max_allocation_excess <= COMPLETENESS_TOL
            && d.entries.iter().all(|e| e.0 > 0.0),
        completeness_gap,
        max_allocation_excess,
        min_weight,
        invalid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::{build_extraction_order, label_order};
    use crate::lp::{build_mcf, build_novel, LpSolver, MicroLpSolver, Objective, DEFAULT_VAR_BUDGET};
    use crate::scenario::{fig3, ring_substrate, unit_request};
    use crate::extraction::Topology;
    use crate::model::RawInstance;

    #[test]
    fn fig3_mcf_extraction_hits_a_conflict() {
        let inst = fig3().build().unwrap();
        let (model, ix) = build_mcf(&inst, Objective::Profit);
        let sol = MicroLpSolver.solve(&model);
        assert!((sol.objective - 1.0).abs() < 1e-6);
        let req = &inst.requests[0];
        let order = build_extraction_order(&req.topology(), 0).unwrap();
        assert_eq!(
            decompose_mcf_tree(&inst.substrate, req, &order, &ix.requests[0], &sol.values),
            Err(DecompositionError::NotATree)
        );
        let err = decompose_mcf_naive(&inst.substrate, req, &order, &ix.requests[0], &sol.values);
        assert!(matches!(err, Err(DecompositionError::Conflict { .. })), "{err:?}");
    }

    #[test]
    fn fig3_novel_lp_is_zero_and_decomposes_empty() {
        let inst = fig3().build().unwrap();
        let req = &inst.requests[0];
        let order = label_order(build_extraction_order(&req.topology(), 0).unwrap());
        let (model, ix) = build_novel(&inst, &[order], Objective::Profit, DEFAULT_VAR_BUDGET).unwrap();
        let sol = MicroLpSolver.solve(&model);
        assert!(sol.objective.abs() < 1e-9);
        let d = decompose_novel(&inst.substrate, req, &ix.requests[0], &sol.values).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn triangle_on_ring_decomposes_completely() {
        let topo = Topology {
            node_names: vec!["i".into(), "j".into(), "k".into()],
            edges: vec![(0, 1), (1, 2), (2, 0)],
        };
        let raw = RawInstance {
            substrate: ring_substrate(6, 1.5, 1.5),
            requests: vec![unit_request("a", &topo, 1.0), unit_request("b", &topo, 1.0)],
        };
        let inst = raw.build().unwrap();
        let orders: Vec<_> = inst
            .requests
            .iter()
            .map(|r| label_order(build_extraction_order(&r.topology(), 0).unwrap()))
            .collect();
        let (model, ix) = build_novel(&inst, &orders, Objective::Profit, DEFAULT_VAR_BUDGET).unwrap();
        let sol = MicroLpSolver.solve(&model);
        assert!(sol.is_optimal());
        for (r, req) in inst.requests.iter().enumerate() {
            let d = decompose_novel(&inst.substrate, req, &ix.requests[r], &sol.values).unwrap();
            let slice = SolutionSlice::from_novel(&ix.requests[r], &sol);
            let rep = verify_decomposition(&inst.substrate, req, &d, &slice);
            assert!(rep.passed, "{rep:?}");
        }
    }
}
