//! Linear and integer programming: the simplex engine, branch-and-bound, and
//! the parametrized player program.

mod branch_bound;
mod simplex;

pub use branch_bound::{most_fractional, solve_ip, solve_mip, SearchBudget, INTEGRALITY_EPS};
pub use simplex::{
    solve_lp, solve_lp_with_tableau, ColumnState, FinalTableau, LinearProgram, LpResult, LpStatus,
    RowSense,
};

use crate::error::{ensure_dim, usage, Result};
use crate::numerics::{check_finite, dot, SparseMatrix};
use crate::poly::Polyhedron;

/// One player's program: minimize `c·x + (x⁻ⁱ)ᵀ C x` over
/// `{A x ≤ b, lb ≤ x ≤ ub, x_j ∈ ℤ for j ∈ integers}`.
///
/// Rows of `C` follow the opponents' variables in ascending player order.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerProgram {
    name: String,
    cost: Vec<f64>,
    cross: SparseMatrix,
    constraints: SparseMatrix,
    rhs: Vec<f64>,
    integers: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PlayerProgram {
    /// Validates and builds a program. `bounds` holds `(lb, ub)` per
    /// variable; integer variables need both finite.
    pub fn new(
        name: impl Into<String>,
        cost: Vec<f64>,
        cross: SparseMatrix,
        constraints: SparseMatrix,
        rhs: Vec<f64>,
        integers: Vec<usize>,
        bounds: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let m = cost.len();
        check_finite("c", &cost)?;
        check_finite("b", &rhs)?;
        ensure_dim("columns of C", m, cross.ncols())?;
        ensure_dim("columns of A", m, constraints.ncols())?;
        ensure_dim("rows of A vs length of b", constraints.nrows(), rhs.len())?;
        ensure_dim("bounds", m, bounds.len())?;
        let mut integers = integers;
        let mut seen = vec![false; m];
        for &j in &integers {
            if j >= m {
                return Err(usage(format!("integer index {j} out of range 0..{m}")));
            }
            if seen[j] {
                return Err(usage(format!("integer index {j} listed twice")));
            }
            seen[j] = true;
        }
        integers.sort_unstable();
        for (j, &(l, u)) in bounds.iter().enumerate() {
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(usage(format!("variable {j}: invalid bounds [{l}, {u}]")));
            }
            if seen[j] && !(l.is_finite() && u.is_finite()) {
                return Err(usage(format!(
                    "integer variable {j} requires finite bounds"
                )));
            }
        }
        let (lower, upper) = bounds.into_iter().unzip();
        Ok(PlayerProgram {
            name: name.into(),
            cost,
            cross,
            constraints,
            rhs,
            integers,
            lower,
            upper,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    /// Number of opponent variables the objective is parametrized in.
    pub fn num_params(&self) -> usize {
        self.cross.nrows()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn cross(&self) -> &SparseMatrix {
        &self.cross
    }

    pub fn constraints(&self) -> &SparseMatrix {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn integers(&self) -> &[usize] {
        &self.integers
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.lower
            .iter()
            .copied()
            .zip(self.upper.iter().copied())
            .collect()
    }

    pub fn is_integer(&self, j: usize) -> bool {
        self.integers.binary_search(&j).is_ok()
    }

    pub fn is_pure_integer(&self) -> bool {
        self.integers.len() == self.num_vars()
    }

    /// Effective own-variable cost `c + Cᵀ·opponents`.
    pub fn parametrized_objective(&self, opponents: &[f64]) -> Result<Vec<f64>> {
        ensure_dim("opponent vector", self.num_params(), opponents.len())?;
        let mut d = self.cross.spmv_transposed(opponents)?;
        for (dj, cj) in d.iter_mut().zip(&self.cost) {
            *dj += cj;
        }
        Ok(d)
    }

    /// `c·x + (x⁻ⁱ)ᵀ C x`, minimization form.
    pub fn payoff(&self, own: &[f64], opponents: &[f64]) -> Result<f64> {
        ensure_dim("own strategy", self.num_vars(), own.len())?;
        let d = self.parametrized_objective(opponents)?;
        Ok(dot(&d, own))
    }

    /// Relaxation with the given objective.
    pub fn linear_relaxation(&self, objective: Vec<f64>) -> Result<LinearProgram> {
        ensure_dim("objective", self.num_vars(), objective.len())?;
        LinearProgram::new(
            objective,
            self.constraints.to_dense(),
            self.rhs.clone(),
            self.lower.clone(),
            self.upper.clone(),
        )
    }

    /// The polyhedron obtained by dropping integrality.
    pub fn relaxation(&self) -> Polyhedron {
        Polyhedron::new(
            self.constraints.to_dense(),
            self.rhs.clone(),
            self.lower.clone(),
            self.upper.clone(),
        )
        .expect("player program dimensions are validated at construction")
    }

    /// Membership in the player's feasible set, integrality included.
    pub fn is_feasible(&self, x: &[f64], eps: f64) -> bool {
        x.len() == self.num_vars()
            && self.relaxation().contains(x, eps)
            && self
                .integers
                .iter()
                .all(|&j| (x[j] - x[j].round()).abs() <= eps)
    }

    /// Program with `c` and `C` multiplied by `factor`.
    pub fn scaled_objective(&self, factor: f64) -> PlayerProgram {
        let mut p = self.clone();
        for c in &mut p.cost {
            *c *= factor;
        }
        p.cross = p.cross.scaled(factor);
        p
    }

    /// Same program with a different cross-term matrix.
    pub fn with_cross(&self, cross: SparseMatrix) -> Result<PlayerProgram> {
        ensure_dim("columns of C", self.num_vars(), cross.ncols())?;
        let mut p = self.clone();
        p.cross = cross;
        Ok(p)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> PlayerProgram {
        self.name = name.into();
        self
    }
}
