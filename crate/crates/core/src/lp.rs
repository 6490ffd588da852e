//! Minimal sparse linear-program representation with a deterministic solver
//! and an independent residual checker.
//!
//! The solve itself is delegated to `microlp` (a revised-simplex
//! implementation); everything the rest of the crate relies on goes through
//! this interface, and [`verify`] recomputes feasibility and the objective
//! from the stored problem without touching solver state.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Row {
    /// Sparse (variable, coefficient) entries; indices unique and sorted.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A maximization problem over nonnegative (by default) variables.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
    lower: Vec<f64>,
    upper: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        assert!(var < self.num_vars, "objective variable out of range");
        assert!(coeff.is_finite());
        self.objective[var] = coeff;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: Option<f64>) {
        assert!(var < self.num_vars, "bounded variable out of range");
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Adds a constraint row; duplicate variable references are merged.
    pub fn add_row(&mut self, coeffs: impl IntoIterator<Item = (usize, f64)>, sense: Sense, rhs: f64) {
        let mut merged: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for (var, coeff) in coeffs {
            assert!(var < self.num_vars, "row variable out of range");
            assert!(coeff.is_finite());
            *merged.entry(var).or_insert(0.0) += coeff;
        }
        assert!(rhs.is_finite());
        self.rows.push(Row {
            coeffs: merged.into_iter().collect(),
            sense,
            rhs,
        });
    }

    /// Writes the program in CPLEX LP text form for cross-checking against
    /// external solvers.
    pub fn to_lp_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        s.push_str("Maximize\n obj:");
        for (var, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(s, " {} {} x{}", if c < 0.0 { "-" } else { "+" }, c.abs(), var);
            }
        }
        s.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(s, " c{i}:");
            for &(var, c) in &row.coeffs {
                let _ = write!(s, " {} {} x{}", if c < 0.0 { "-" } else { "+" }, c.abs(), var);
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(s, " {op} {}", row.rhs);
        }
        s.push_str("Bounds\n");
        for var in 0..self.num_vars {
            match self.upper[var] {
                Some(ub) => {
                    let _ = writeln!(s, " {} <= x{var} <= {ub}", self.lower[var]);
                }
                None => {
                    let _ = writeln!(s, " x{var} >= {}", self.lower[var]);
                }
            }
        }
        s.push_str("End\n");
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::NumericalFailure => "numerical_failure",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; meaningful only for `Optimal`.
    pub objective: f64,
    /// Primal point; empty unless `Optimal`.
    pub primal: Vec<f64>,
    pub iterations: u64,
}

/// Tolerance profile for solves and residual checks.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Absolute bound on constraint residuals of a reported optimum.
    pub feasibility: f64,
    /// Relative objective gap accepted when cross-checking objectives.
    pub optimality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-9,
            optimality: 1e-7,
        }
    }
}

/// Solves the program. Identical inputs produce identical outputs; a
/// solution is only reported `Optimal` after its residuals pass the
/// feasibility tolerance, otherwise the status is `NumericalFailure`.
pub fn solve(lp: &LinearProgram, tol: &Tolerances) -> LpSolution {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<microlp::Variable> = (0..lp.num_vars)
        .map(|v| {
            problem.add_var(
                lp.objective[v],
                (lp.lower[v], lp.upper[v].unwrap_or(f64::INFINITY)),
            )
        })
        .collect();
    for row in &lp.rows {
        let expr: Vec<(microlp::Variable, f64)> =
            row.coeffs.iter().map(|&(v, c)| (vars[v], c)).collect();
        let op = match row.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Eq => ComparisonOp::Eq,
            Sense::Ge => ComparisonOp::Ge,
        };
        problem.add_constraint(expr, op, row.rhs);
    }

    match problem.solve() {
        Ok(outcome) => match outcome.into_solution() {
            Ok(solution) => {
                let primal: Vec<f64> = vars.iter().map(|&v| solution.var_value(v)).collect();
                let iterations = solution.stats().lp_iterations;
                let objective = solution.objective();
                match verify(lp, &primal) {
                    Ok(report)
                        if report.max_row_residual <= tol.feasibility
                            && report.max_bound_violation <= tol.feasibility =>
                    {
                        LpSolution {
                            status: LpStatus::Optimal,
                            objective,
                            primal,
                            iterations,
                        }
                    }
                    _ => LpSolution {
                        status: LpStatus::NumericalFailure,
                        objective: f64::NAN,
                        primal: Vec::new(),
                        iterations,
                    },
                }
            }
            Err(_) => LpSolution {
                status: LpStatus::NumericalFailure,
                objective: f64::NAN,
                primal: Vec::new(),
                iterations: 0,
            },
        },
        Err(microlp::Error::Infeasible) => LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            primal: Vec::new(),
            iterations: 0,
        },
        Err(microlp::Error::Unbounded) => LpSolution {
            status: LpStatus::Unbounded,
            objective: f64::NAN,
            primal: Vec::new(),
            iterations: 0,
        },
        Err(_) => LpSolution {
            status: LpStatus::NumericalFailure,
            objective: f64::NAN,
            primal: Vec::new(),
            iterations: 0,
        },
    }
}

/// Residuals of a candidate primal point against the stored problem.
#[derive(Clone, Copy, Debug)]
pub struct ResidualReport {
    /// Largest absolute violation across all rows.
    pub max_row_residual: f64,
    /// Largest violation of a variable bound.
    pub max_bound_violation: f64,
    /// Objective recomputed from the primal point.
    pub objective: f64,
}

/// Recomputes row residuals, bound violations, and the objective from
/// scratch. Independent of the solver: uses only the stored rows.
pub fn verify(lp: &LinearProgram, primal: &[f64]) -> Result<ResidualReport> {
    if primal.len() != lp.num_vars {
        return Err(Error::DimensionMismatch {
            expected: lp.num_vars,
            got: primal.len(),
        });
    }
    let mut max_row_residual = 0.0f64;
    for row in &lp.rows {
        let lhs: f64 = row.coeffs.iter().map(|&(v, c)| c * primal[v]).sum();
        let violation = match row.sense {
            Sense::Le => lhs - row.rhs,
            Sense::Ge => row.rhs - lhs,
            Sense::Eq => (lhs - row.rhs).abs(),
        };
        max_row_residual = max_row_residual.max(violation);
    }
    let mut max_bound_violation = 0.0f64;
    for v in 0..lp.num_vars {
        max_bound_violation = max_bound_violation.max(lp.lower[v] - primal[v]);
        if let Some(ub) = lp.upper[v] {
            max_bound_violation = max_bound_violation.max(primal[v] - ub);
        }
    }
    let objective = lp
        .objective
        .iter()
        .enumerate()
        .map(|(v, &c)| c * primal[v])
        .sum();
    Ok(ResidualReport {
        max_row_residual: max_row_residual.max(0.0),
        max_bound_violation: max_bound_violation.max(0.0),
        objective,
    })
}
