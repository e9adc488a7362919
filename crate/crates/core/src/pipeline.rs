//! End-to-end run: orders, novel LP, decomposition, rounding and a report.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::{
    decompose_novel, verify_decomposition, ConvexDecomposition, DecompositionError, SolutionSlice,
};
use crate::extraction::{
    min_width_order_search, ExtractionError, LabeledExtractionOrder, SearchStrategy,
    EXHAUSTIVE_NODE_LIMIT,
};
use crate::lp::{build_novel, LpError, LpSolver, LpStatus, Objective, DEFAULT_VAR_BUDGET};
use crate::model::{resource_stats, Instance, MappingRecord};
use crate::rounding::{
    compute_bounds, preprocess_profit, prune_costly_mappings, round_cost, round_profit,
    RoundedSolution, RoundingBounds, RoundingError, DEFAULT_MAX_TRIES,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub objective: Objective,
    pub seed: u64,
    pub max_tries: usize,
    pub strategy: SearchStrategy,
    pub var_budget: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    /// Record wall-clock stage times; reports are then no longer reproducible.
    pub timings: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            objective: Objective::Profit,
            seed: 0,
            max_tries: DEFAULT_MAX_TRIES,
            strategy: SearchStrategy::PerRootBfs,
            var_budget: DEFAULT_VAR_BUDGET,
            alpha: None,
            beta: None,
            gamma: None,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PipelineError {
    #[error("width stage, request {request}: {error}")]
    Width {
        request: String,
        error: ExtractionError,
    },
    #[error("lp stage: {0}")]
    Lp(#[from] LpError),
    #[error("lp stage: solver returned {0:?}")]
    LpStatus(LpStatus),
    #[error("decomposition stage, request {request}: {error}")]
    Decomposition {
        request: String,
        error: DecompositionError,
    },
    #[error("decomposition stage, request {request}: verification failed")]
    Verification { request: String },
    #[error("rounding stage: {0}")]
    Rounding(#[from] RoundingError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionStats {
    pub entries: usize,
    pub total_weight: f64,
    pub completeness_gap: f64,
    pub max_allocation_excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneStats {
    pub removed: usize,
    pub wac: f64,
    pub surviving_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestReport {
    pub id: String,
    pub width: usize,
    pub root: String,
    /// Survived profit preprocessing (always true for cost).
    pub kept: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solo_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pruning: Option<PruneStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected: Option<MappingRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub status: LpStatus,
    pub objective: f64,
    /// Objective recomputed from the solution values.
    pub recomputed_objective: f64,
    pub variables: usize,
    pub constraints: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingSummary {
    pub accepted: bool,
    pub tries_used: usize,
    pub objective: f64,
    pub max_node_utilization: f64,
    pub max_edge_utilization: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub width_ms: f64,
    pub lp_ms: f64,
    pub decomposition_ms: f64,
    pub rounding_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub solver: String,
    pub objective: Objective,
    pub seed: u64,
    pub requests: Vec<RequestReport>,
    pub lp: LpReport,
    pub bounds: RoundingBounds,
    pub rounding: RoundingSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

/// Full pipeline output; `rounded` carries the per-try diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutput {
    pub report: RunReport,
    pub rounded: RoundedSolution,
    /// Decompositions of the requests that reached the LP, in `kept` order.
    pub decompositions: Vec<ConvexDecomposition>,
}

/// Minimum-width order of every request, falling back to per-root BFS beyond the exhaustive limit.
pub fn request_orders<T: Scalar>(
    inst: &Instance<T>,
    strategy: SearchStrategy,
) -> Result<Vec<LabeledExtractionOrder>, PipelineError> {
    inst.requests
        .iter()
        .map(|req| {
            let topo = req.topology();
            let strategy = if topo.num_nodes() > EXHAUSTIVE_NODE_LIMIT {
                SearchStrategy::PerRootBfs
            } else {
                strategy
            };
            min_width_order_search(&topo, strategy).map_err(|error| PipelineError::Width {
                request: req.id().to_string(),
                error,
            })
        })
        .collect()
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn run_pipeline<T: Scalar>(
    inst: &Instance<T>,
    config: &PipelineConfig,
    solver: &dyn LpSolver,
) -> Result<PipelineOutput, PipelineError> {
    let objective = config.objective;
    let t = Instant::now();
    let orders = request_orders(inst, config.strategy)?;
    let width_ms = ms(t);

    let t = Instant::now();
    let (kept, solo_values) = match objective {
        Objective::Profit => {
            let p = preprocess_profit(inst, &orders, solver, config.var_budget)?;
            (p.kept, Some(p.solo_values))
        }
        Objective::Cost => ((0..inst.requests.len()).collect(), None),
    };
    let sub = inst.with_requests(&kept);
    let sub_orders: Vec<LabeledExtractionOrder> = kept.iter().map(|&r| orders[r].clone()).collect();
    let (model, index) = build_novel(&sub, &sub_orders, objective, config.var_budget)?;
    let sol = solver.solve(&model);
    if !sol.is_optimal() {
        return Err(PipelineError::LpStatus(sol.status));
    }
    let lp_ms = ms(t);
    let lp = LpReport {
        status: sol.status,
        objective: sol.objective,
        recomputed_objective: model.objective_value(&sol.values),
        variables: model.num_vars(),
        constraints: model.constraints.len(),
    };

    let t = Instant::now();
    let mut decompositions = Vec::with_capacity(kept.len());
    let mut dstats = Vec::with_capacity(kept.len());
    for (k, req) in sub.requests.iter().enumerate() {
        let ix = &index.requests[k];
        let d = decompose_novel(&sub.substrate, req, ix, &sol.values).map_err(|error| {
            PipelineError::Decomposition {
                request: req.id().to_string(),
                error,
            }
        })?;
        let slice = SolutionSlice::from_novel(ix, &sol);
        let rep = verify_decomposition(&sub.substrate, req, &d, &slice);
        if !rep.passed {
            return Err(PipelineError::Verification {
                request: req.id().to_string(),
            });
        }
        dstats.push(DecompositionStats {
            entries: d.len(),
            total_weight: d.total_weight,
            completeness_gap: rep.completeness_gap,
            max_allocation_excess: rep.max_allocation_excess,
        });
        decompositions.push(d);
    }
    let decomposition_ms = ms(t);

    let t = Instant::now();
    let bounds = compute_bounds(&sub, &resource_stats(&sub), objective)?
        .with_overrides(config.alpha, config.beta, config.gamma);
    let mut prune_stats = Vec::new();
    let rounded = match objective {
        Objective::Profit => round_profit(
            &sub,
            &decompositions,
            &bounds,
            sol.objective,
            config.max_tries,
            config.seed,
        ),
        Objective::Cost => {
            let mut pruned = Vec::with_capacity(decompositions.len());
            for (r, d) in decompositions.iter().enumerate() {
                let p = prune_costly_mappings(&sub, r, d)?;
                prune_stats.push(PruneStats {
                    removed: p.removed,
                    wac: p.wac,
                    surviving_weight: p.surviving_weight,
                });
                pruned.push(p.decomposition);
            }
            let out = round_cost(
                &sub,
                &pruned,
                &bounds,
                sol.objective,
                config.max_tries,
                config.seed,
            )?;
            decompositions = pruned;
            out
        }
    };
    let rounding_ms = ms(t);

    let mut requests: Vec<RequestReport> = inst
        .requests
        .iter()
        .zip(&orders)
        .enumerate()
        .map(|(r, (req, order))| RequestReport {
            id: req.id().to_string(),
            width: order.width,
            root: req.node_id(crate::model::VNode(order.root())).to_string(),
            kept: false,
            solo_value: solo_values.as_ref().map(|v| v[r]),
            lp_x: None,
            decomposition: None,
            pruning: None,
            selected: None,
        })
        .collect();
    for (k, &r) in kept.iter().enumerate() {
        let rep = &mut requests[r];
        rep.kept = true;
        rep.lp_x = Some(sol.value(index.requests[k].x));
        rep.decomposition = Some(dstats[k].clone());
        rep.pruning = prune_stats.get(k).cloned();
        rep.selected = rounded.selection[k].map(|e| {
            decompositions[k].entries[e]
                .1
                .to_record(&sub.substrate, &sub.requests[k])
        });
    }

    let report = RunReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        solver: solver.name().to_string(),
        objective,
        seed: config.seed,
        requests,
        lp,
        bounds,
        rounding: RoundingSummary {
            accepted: rounded.accepted,
            tries_used: rounded.tries_used,
            objective: rounded.objective,
            max_node_utilization: rounded.max_node_utilization,
            max_edge_utilization: rounded.max_edge_utilization,
        },
        timings: config.timings.then_some(Timings {
            width_ms,
            lp_ms,
            decomposition_ms,
            rounding_ms,
        }),
    };
    Ok(PipelineOutput {
        report,
        rounded,
        decompositions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::MicroLpSolver;
    use crate::scenario::fixture;

    #[test]
    fn fig3_profit_run_is_empty() {
        let inst = fixture("fig3", 0).unwrap().build().unwrap();
        let out = run_pipeline(&inst, &PipelineConfig::default(), &MicroLpSolver).unwrap();
        assert!(out.report.lp.objective.abs() < 1e-9);
        assert!(!out.report.requests[0].kept);
        assert_eq!(out.report.rounding.objective, 0.0);
    }

    #[test]
    fn reports_are_reproducible() {
        let inst = fixture("servicechain", 0).unwrap().build().unwrap();
        for objective in [Objective::Profit, Objective::Cost] {
            let config = PipelineConfig {
                objective,
                seed: 9,
                ..PipelineConfig::default()
            };
            let a = run_pipeline(&inst, &config, &MicroLpSolver).unwrap();
            let b = run_pipeline(&inst, &config, &MicroLpSolver).unwrap();
            assert_eq!(
                serde_json::to_string(&a.report).unwrap(),
                serde_json::to_string(&b.report).unwrap()
            );
            assert!((a.report.lp.objective - a.report.lp.recomputed_objective).abs() < 1e-6);
        }
    }
}
