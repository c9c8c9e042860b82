//! Dense two-phase simplex for small linear programs.
//!
//! Programs are `maximize c·x` subject to `A x ≤ b`, `E x = d` and
//! `l ≤ x ≤ u`. The solver is deterministic: entering columns follow
//! Dantzig's rule with lowest-index tie-break, switching to Bland's rule after
//! a run of degenerate pivots, and leaving rows break ratio ties on the lowest
//! basic variable index. The same program always produces bit-identical output.

mod tableau;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use tableau::MAX_DEGENERATE_RUN;

/// Feasibility tolerance for constraints and bounds (relative to `max(1, |rhs|)`).
pub const EPS_FEAS: f64 = crate::EPS_FEAS;
/// Pivots smaller than this are never used.
pub const PIVOT_TOL: f64 = 1e-9;
/// Reduced-cost tolerance for optimality.
pub const EPS_OPT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub leq: Vec<Constraint>,
    pub eq: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<Option<f64>>,
}

impl LinearProgram {
    /// `num_vars` non-negative variables, zero objective, no constraints.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            leq: Vec::new(),
            eq: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_leq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.leq.push(Constraint { coeffs, rhs });
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.eq.push(Constraint { coeffs, rhs });
    }

    pub fn add_leq_sparse(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let coeffs = self.densify(terms);
        self.add_leq(coeffs, rhs);
    }

    pub fn add_eq_sparse(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let coeffs = self.densify(terms);
        self.add_eq(coeffs, rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: Option<f64>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    fn densify(&self, terms: &[(usize, f64)]) -> Vec<f64> {
        let mut row = vec![0.0; self.num_vars];
        for &(j, a) in terms {
            row[j] += a;
        }
        row
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        let bad = |what: &str| Err(Error::InvalidArgument(format!("malformed LP: {what}")));
        if self.objective.len() != n || self.lower.len() != n || self.upper.len() != n {
            return bad("vector length differs from num_vars");
        }
        for c in self.leq.iter().chain(&self.eq) {
            if c.coeffs.len() != n {
                return bad("constraint length differs from num_vars");
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return bad("non-finite constraint data");
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return bad("non-finite objective");
        }
        for (l, u) in self.lower.iter().zip(&self.upper) {
            if !l.is_finite() {
                return bad("lower bounds must be finite");
            }
            if let Some(u) = u {
                if !u.is_finite() || u < l {
                    return bad("upper bound below lower bound");
                }
            }
        }
        Ok(())
    }

    /// Largest constraint or bound violation of `x`, each scaled by `max(1, |rhs|)`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |a: &[f64]| a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
        let scale = |b: f64| b.abs().max(1.0);
        let mut worst = 0.0f64;
        for c in &self.leq {
            worst = worst.max((dot(&c.coeffs) - c.rhs) / scale(c.rhs));
        }
        for c in &self.eq {
            worst = worst.max((dot(&c.coeffs) - c.rhs).abs() / scale(c.rhs));
        }
        for j in 0..self.num_vars {
            worst = worst.max((self.lower[j] - x[j]) / scale(self.lower[j]));
            if let Some(u) = self.upper[j] {
                worst = worst.max((x[j] - u) / scale(u));
            }
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Multipliers certifying optimality: `leq[i] ≥ 0`, `upper[j] ≥ 0` and free
/// `eq[i]`, such that `Aᵀ·leq + Eᵀ·eq + upper − c` is non-negative (it is the
/// multiplier of the lower bounds).
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub leq: Vec<f64>,
    pub eq: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DualCertificate {
    /// Reduced costs `Aᵀy + Eᵀw + s − c`, one per variable.
    pub fn reduced_costs(&self, lp: &LinearProgram) -> Vec<f64> {
        let mut r: Vec<f64> = self.upper.iter().zip(&lp.objective).map(|(s, c)| s - c).collect();
        for (c, y) in lp.leq.iter().zip(&self.leq) {
            for (rj, a) in r.iter_mut().zip(&c.coeffs) {
                *rj += a * y;
            }
        }
        for (c, w) in lp.eq.iter().zip(&self.eq) {
            for (rj, a) in r.iter_mut().zip(&c.coeffs) {
                *rj += a * w;
            }
        }
        r
    }

    /// Dual objective `b·y + d·w + u·s − l·r`: an upper bound on the primal
    /// optimum whenever the multipliers are dual feasible.
    pub fn bound(&self, lp: &LinearProgram) -> f64 {
        let r = self.reduced_costs(lp);
        let mut total = 0.0;
        for (c, y) in lp.leq.iter().zip(&self.leq) {
            total += c.rhs * y;
        }
        for (c, w) in lp.eq.iter().zip(&self.eq) {
            total += c.rhs * w;
        }
        for j in 0..lp.num_vars {
            if let Some(u) = lp.upper[j] {
                total += u * self.upper[j];
            }
            total -= lp.lower[j] * r[j];
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Present when `status` is `Optimal`.
    pub duals: Option<DualCertificate>,
    pub pivots: usize,
}

impl LpSolution {
    /// Values of an optimal solution, or an error for any other status.
    pub fn optimal(self) -> Result<LpSolution> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::UnexpectedLpStatus("infeasible")),
            LpStatus::Unbounded => Err(Error::UnexpectedLpStatus("unbounded")),
        }
    }
}

/// Solves `lp`. Numerical trouble (no usable pivot, iteration limit, or a
/// final point outside the feasibility tolerance) is reported as
/// [`Error::NumericalFailure`], never as a wrong answer.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    tableau::solve(lp)
}
