//! Linear programs: generic model, pluggable solvers and the two VNEP formulations.

mod export;
mod mcf;
mod novel;
mod solver;
mod space;

pub use export::write_lp_format;
pub use mcf::{add_flow_block, build_mcf, FlowBlock, McfRequestIndex, McfVariableIndex};
pub use novel::{
    build_novel, novel_variable_count, NovelRequestIndex, NovelVariableIndex, DEFAULT_VAR_BUDGET,
};
pub use solver::{default_solver, solver_by_name, LpSolver, MicroLpSolver, SOLVER_ENV};
pub use space::LabelSpace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Values closer than this to a bound are snapped onto it after solving.
pub const BOUND_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Which VNEP objective a model optimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Maximize the profit of embedded requests.
    Profit,
    /// Embed every request at minimum resource cost.
    Cost,
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "profit" => Ok(Objective::Profit),
            "cost" => Ok(Objective::Cost),
            other => Err(format!("unknown variant {other:?}, expected profit or cost")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpModel {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl LpModel {
    pub fn new(sense: Sense) -> Self {
        LpModel {
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn add_var(&mut self, name: String, lower: f64, upper: f64, objective: f64) -> VarId {
        self.variables.push(Variable {
            name,
            lower,
            upper,
            objective,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn set_objective(&mut self, v: VarId, coef: f64) {
        self.variables[v.0].objective = coef;
    }

    pub fn set_upper(&mut self, v: VarId, upper: f64) {
        self.variables[v.0].upper = upper;
    }

    pub fn add_constraint(
        &mut self,
        name: String,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        self.constraints.push(Constraint {
            name,
            terms,
            relation,
            rhs,
        });
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(values)
            .map(|(v, x)| v.objective * x)
            .sum()
    }

    /// Largest bound or row violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &x) in self.variables.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * values[v.0]).sum();
            let d = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(d);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
}

impl LpSolution {
    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LpError {
    #[error("unknown solver backend {0:?}")]
    UnknownSolver(String),
    #[error("novel formulation needs {required} variables, budget is {budget}")]
    BudgetExceeded { required: usize, budget: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_maximization() {
        let mut m = LpModel::new(Sense::Maximize);
        let x = m.add_var("x".into(), 0.0, 1.0, 1.0);
        m.add_constraint("c".into(), vec![(x, 1.0)], Relation::Le, 0.5);
        let s = MicroLpSolver.solve(&m);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 0.5).abs() < 1e-9);
        assert!((s.value(x) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded_statuses() {
        let mut m = LpModel::new(Sense::Maximize);
        let x = m.add_var("x".into(), 0.0, 1.0, 1.0);
        m.add_constraint("c".into(), vec![(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(MicroLpSolver.solve(&m).status, LpStatus::Infeasible);

        let mut m = LpModel::new(Sense::Maximize);
        m.add_var("x".into(), 0.0, f64::INFINITY, 1.0);
        assert_eq!(MicroLpSolver.solve(&m).status, LpStatus::Unbounded);
    }

    #[test]
    fn empty_model_is_optimal_with_zero_objective() {
        let s = MicroLpSolver.solve(&LpModel::new(Sense::Minimize));
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn violated_empty_row_is_infeasible() {
        let mut m = LpModel::new(Sense::Minimize);
        m.add_var("x".into(), 0.0, 1.0, 0.0);
        m.add_constraint("c".into(), vec![], Relation::Ge, 1.0);
        assert_eq!(MicroLpSolver.solve(&m).status, LpStatus::Infeasible);
    }
}
