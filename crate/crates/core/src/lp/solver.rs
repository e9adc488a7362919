use std::collections::BTreeMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::{LpError, LpModel, LpSolution, LpStatus, Relation, Sense, BOUND_TOL};

/// Environment variable naming the default backend.
pub const SOLVER_ENV: &str = "VNEP_SOLVER";

pub trait LpSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, model: &LpModel) -> LpSolution;
}

/// Bundled pure-Rust simplex backend.
#[derive(Clone, Copy, Debug, Default)]
pub struct MicroLpSolver;

impl LpSolver for MicroLpSolver {
    fn name(&self) -> &'static str {
        "microlp"
    }

    fn solve(&self, model: &LpModel) -> LpSolution {
        let failed = |status| LpSolution {
            status,
            objective: f64::NAN,
            values: Vec::new(),
        };
        for c in model.constraints.iter().filter(|c| c.terms.is_empty()) {
            let ok = match c.relation {
                Relation::Le => 0.0 <= c.rhs + BOUND_TOL,
                Relation::Ge => 0.0 >= c.rhs - BOUND_TOL,
                Relation::Eq => c.rhs.abs() <= BOUND_TOL,
            };
            if !ok {
                return failed(LpStatus::Infeasible);
            }
        }
        if model.variables.is_empty() {
            return LpSolution {
                status: LpStatus::Optimal,
                objective: 0.0,
                values: Vec::new(),
            };
        }
        let dir = match model.sense {
            Sense::Maximize => OptimizationDirection::Maximize,
            Sense::Minimize => OptimizationDirection::Minimize,
        };
        let mut p = Problem::new(dir);
        let vars: Vec<_> = model
            .variables
            .iter()
            .map(|v| p.add_var(v.objective, (v.lower, v.upper)))
            .collect();
        for c in model.constraints.iter().filter(|c| !c.terms.is_empty()) {
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            for &(v, a) in &c.terms {
                *merged.entry(v.0).or_insert(0.0) += a;
            }
            let terms: Vec<_> = merged.into_iter().map(|(v, a)| (vars[v], a)).collect();
            let op = match c.relation {
                Relation::Le => ComparisonOp::Le,
                Relation::Eq => ComparisonOp::Eq,
                Relation::Ge => ComparisonOp::Ge,
            };
            p.add_constraint(terms.as_slice(), op, c.rhs);
        }
        match p.solve() {
            Ok(microlp::SolveOutcome::Solution(sol)) => {
                let values: Vec<f64> = model
                    .variables
                    .iter()
                    .zip(&vars)
                    .map(|(def, &v)| {
                        sol.var_value(v).clamp(def.lower, def.upper)
                    })
                    .collect();
                LpSolution {
                    status: LpStatus::Optimal,
                    objective: model.objective_value(&values),
                    values,
                }
            }
            Ok(microlp::SolveOutcome::Interrupted(_)) => failed(LpStatus::Error),
            Err(microlp::Error::Infeasible) => failed(LpStatus::Infeasible),
            Err(microlp::Error::Unbounded) => failed(LpStatus::Unbounded),
            Err(_) => failed(LpStatus::Error),
        }
    }
}

pub fn solver_by_name(name: &str) -> Result<Box<dyn LpSolver>, LpError> {
    match name {
        "microlp" => Ok(Box::new(MicroLpSolver)),
        other => Err(LpError::UnknownSolver(other.to_string())),
    }
}

/// Backend named by `VNEP_SOLVER`, or the bundled one.
pub fn default_solver() -> Result<Box<dyn LpSolver>, LpError> {
    match std::env::var(SOLVER_ENV) {
        Ok(name) if !name.is_empty() => solver_by_name(&name),
        _ => Ok(Box::new(MicroLpSolver)),
    }
}
