//! Bounded-variable primal simplex on a dense tableau.
//!
//! Every row `a·x ≤ b` (or `= b`) gets a slack `s` with `a·x + s = b`,
//! `s ∈ [0, ∞)` (or `[0, 0]`). Variable bounds are handled by the ratio test,
//! never expanded into rows. Rows whose slack cannot start basic receive an
//! artificial column; phase one drives those to zero.

use crate::error::{ensure_dim, usage, Error, Result};
use crate::numerics::{check_finite, dot, DenseMatrix};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
/// Degenerate pivots tolerated before switching to Bland's rule.
const BLAND_AFTER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
}

/// `min c·x  s.t.  A x (≤|=) b,  lb ≤ x ≤ ub`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub senses: Vec<RowSense>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// Program with only `≤` rows.
    pub fn new(
        objective: Vec<f64>,
        a: DenseMatrix,
        b: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let senses = vec![RowSense::Le; b.len()];
        let lp = LinearProgram {
            objective,
            a,
            b,
            senses,
            lower,
            upper,
        };
        lp.validate()?;
        Ok(lp)
    }

    /// Program with no rows, only bounds.
    pub fn bounds_only(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        Self::new(objective, DenseMatrix::zeros(0, n), vec![], lower, upper)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn add_row(&mut self, coefs: &[f64], sense: RowSense, rhs: f64) -> Result<()> {
        ensure_dim("row", self.num_vars(), coefs.len())?;
        if self.a.nrows() == 0 && self.a.ncols() != self.num_vars() {
            self.a = DenseMatrix::zeros(0, self.num_vars());
        }
        self.a.push_row(coefs)?;
        self.b.push(rhs);
        self.senses.push(sense);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        ensure_dim("constraint columns", n, self.a.ncols())?;
        ensure_dim("rhs", self.a.nrows(), self.b.len())?;
        ensure_dim("row senses", self.a.nrows(), self.senses.len())?;
        ensure_dim("lower bounds", n, self.lower.len())?;
        ensure_dim("upper bounds", n, self.upper.len())?;
        check_finite("objective", &self.objective)?;
        check_finite("rhs", &self.b)?;
        if !self.a.is_finite() {
            return Err(usage("constraint matrix has a non-finite entry"));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(usage(format!("variable {j}: invalid bounds [{l}, {u}]")));
            }
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, r) in self.a.rows().enumerate() {
            let ax = dot(r, x);
            let v = match self.senses[i] {
                RowSense::Le => ax - self.b[i],
                RowSense::Eq => (ax - self.b[i]).abs(),
            };
            worst = worst.max(v);
        }
        for (j, xj) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - xj).max(xj - self.upper[j]);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Primal point; meaningful only when `Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    /// `∂objective/∂b_i`; non-positive on `≤` rows at optimality.
    pub row_duals: Vec<f64>,
    /// `c − Aᵀ·row_duals`, the multipliers of the active bounds.
    pub reduced_costs: Vec<f64>,
}

impl LpResult {
    fn without_solution(status: LpStatus, n: usize, m: usize) -> Self {
        LpResult {
            status,
            x: vec![f64::NAN; n],
            objective: match status {
                LpStatus::Unbounded => f64::NEG_INFINITY,
                _ => f64::INFINITY,
            },
            row_duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Lagrangian dual bound built from the returned multipliers. Bounds
    /// with infinite value and the wrong reduced-cost sign give `-∞`.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let mut val = dot(&self.row_duals, &lp.b);
        for j in 0..lp.num_vars() {
            let d = self.reduced_costs[j];
            if d > 0.0 {
                val += d * lp.lower[j];
            } else if d < 0.0 {
                val += d * lp.upper[j];
            }
        }
        if val.is_nan() {
            f64::NEG_INFINITY
        } else {
            val
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnState {
    Basic,
    AtLower,
    AtUpper,
    /// Free nonbasic variable parked at zero.
    FreeZero,
}

/// Final simplex tableau, expressed over structural and slack columns.
///
/// Row `r` reads `x_{basic[r]} + Σ_j rows[r][j]·x_j = …` over the nonbasic
/// columns `j`; slack column `n + i` belongs to row `i` of the program.
#[derive(Debug, Clone)]
pub struct FinalTableau {
    pub num_structural: usize,
    pub basic: Vec<usize>,
    pub rows: DenseMatrix,
    pub basic_values: Vec<f64>,
    pub states: Vec<ColumnState>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

struct Tableau {
    n: usize,
    m: usize,
    ncols: usize,
    t: DenseMatrix,
    beta: Vec<f64>,
    basic: Vec<usize>,
    state: Vec<ColumnState>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    /// Column that formed the initial basis in each row, with its sign.
    init_col: Vec<(usize, f64)>,
    degenerate: usize,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        for s in &lp.senses {
            lower.push(0.0);
            upper.push(match s {
                RowSense::Le => f64::INFINITY,
                RowSense::Eq => 0.0,
            });
        }
        let mut state: Vec<ColumnState> = (0..n)
            .map(|j| {
                if lower[j].is_finite() {
                    ColumnState::AtLower
                } else if upper[j].is_finite() {
                    ColumnState::AtUpper
                } else {
                    ColumnState::FreeZero
                }
            })
            .collect();
        let xn: Vec<f64> = (0..n)
            .map(|j| nonbasic_value(state[j], lower[j], upper[j]))
            .collect();

        let mut art_rows = Vec::new();
        let mut residual = Vec::with_capacity(m);
        for i in 0..m {
            let r = lp.b[i] - dot(lp.a.row(i), &xn);
            residual.push(r);
            let slack_ok = match lp.senses[i] {
                RowSense::Le => r >= 0.0,
                RowSense::Eq => false,
            };
            if !slack_ok {
                art_rows.push(i);
            }
        }
        let ncols = n + m + art_rows.len();
        let mut t = DenseMatrix::zeros(m, ncols);
        let mut beta = vec![0.0; m];
        let mut basic = vec![0; m];
        let mut init_col = vec![(0, 1.0); m];
        state.extend(std::iter::repeat_n(ColumnState::AtLower, m));
        let mut art_iter = art_rows.iter().enumerate().peekable();
        for i in 0..m {
            let row = t.row_mut(i);
            row[..n].copy_from_slice(lp.a.row(i));
            row[n + i] = 1.0;
            if let Some((k, _)) = art_iter.next_if(|&(_, &r)| r == i) {
                let col = n + m + k;
                let sign = if residual[i] >= 0.0 { 1.0 } else { -1.0 };
                row[col] = sign;
                if sign < 0.0 {
                    for v in row.iter_mut() {
                        *v = -*v;
                    }
                }
                beta[i] = residual[i].abs();
                basic[i] = col;
                init_col[i] = (col, sign);
                state[n + i] = ColumnState::AtLower;
            } else {
                beta[i] = residual[i];
                basic[i] = n + i;
                init_col[i] = (n + i, 1.0);
                state[n + i] = ColumnState::Basic;
            }
        }
        for _ in 0..art_rows.len() {
            lower.push(0.0);
            upper.push(f64::INFINITY);
            state.push(ColumnState::Basic);
        }
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(n + m) {
            *c = 1.0;
        }
        let mut tab = Tableau {
            n,
            m,
            ncols,
            t,
            beta,
            basic,
            state,
            lower,
            upper,
            cost,
            d: vec![0.0; ncols],
            init_col,
            degenerate: 0,
            pivots: 0,
        };
        tab.recompute_reduced_costs();
        tab
    }

    fn has_artificials(&self) -> bool {
        self.ncols > self.n + self.m
    }

    fn recompute_reduced_costs(&mut self) {
        let mut d = self.cost.clone();
        for r in 0..self.m {
            let cb = self.cost[self.basic[r]];
            if cb != 0.0 {
                for (dj, tj) in d.iter_mut().zip(self.t.row(r)) {
                    *dj -= cb * tj;
                }
            }
        }
        for r in 0..self.m {
            d[self.basic[r]] = 0.0;
        }
        self.d = d;
    }

    fn value_of(&self, j: usize) -> f64 {
        nonbasic_value(self.state[j], self.lower[j], self.upper[j])
    }

    fn objective(&self) -> f64 {
        let mut v = 0.0;
        for r in 0..self.m {
            v += self.cost[self.basic[r]] * self.beta[r];
        }
        for j in 0..self.ncols {
            if self.state[j] != ColumnState::Basic && self.cost[j] != 0.0 {
                v += self.cost[j] * self.value_of(j);
            }
        }
        v
    }

    fn step(&mut self) -> Step {
        let bland = self.degenerate > BLAND_AFTER;
        let mut enter: Option<(usize, f64)> = None;
        let mut best = 0.0;
        for j in 0..self.ncols {
            let dir = match self.state[j] {
                ColumnState::Basic => continue,
                _ if self.lower[j] == self.upper[j] => continue,
                ColumnState::AtLower if self.d[j] < -COST_TOL => 1.0,
                ColumnState::AtUpper if self.d[j] > COST_TOL => -1.0,
                ColumnState::FreeZero if self.d[j].abs() > COST_TOL => -self.d[j].signum(),
                _ => continue,
            };
            if bland {
                enter = Some((j, dir));
                break;
            }
            if self.d[j].abs() > best {
                best = self.d[j].abs();
                enter = Some((j, dir));
            }
        }
        let Some((j, dir)) = enter else {
            return Step::Optimal;
        };

        // Ratio test.
        let mut theta = f64::INFINITY;
        let mut leave: Option<usize> = None;
        let mut leave_piv = 0.0;
        if self.lower[j].is_finite() && self.upper[j].is_finite() {
            theta = self.upper[j] - self.lower[j];
        }
        for r in 0..self.m {
            let tij = self.t[(r, j)];
            if tij.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -dir * tij;
            let b = self.basic[r];
            let limit = if rate < 0.0 {
                if !self.lower[b].is_finite() {
                    continue;
                }
                (self.beta[r] - self.lower[b]) / -rate
            } else {
                if !self.upper[b].is_finite() {
                    continue;
                }
                (self.upper[b] - self.beta[r]) / rate
            };
            let limit = limit.max(0.0);
            let better = if limit < theta - 1e-12 {
                true
            } else if limit <= theta + 1e-12 {
                match leave {
                    Some(prev) if bland => b < self.basic[prev],
                    Some(_) => tij.abs() > leave_piv,
                    None => false,
                }
            } else {
                false
            };
            if better {
                theta = limit;
                leave = Some(r);
                leave_piv = tij.abs();
            }
        }
        if theta == f64::INFINITY {
            return Step::Unbounded;
        }
        if theta <= 1e-12 {
            self.degenerate += 1;
        }
        self.pivots += 1;

        for r in 0..self.m {
            let tij = self.t[(r, j)];
            if tij != 0.0 {
                self.beta[r] += -dir * tij * theta;
            }
        }
        let entering_value = self.value_of(j) + dir * theta;

        match leave {
            None => {
                self.state[j] = if dir > 0.0 {
                    ColumnState::AtUpper
                } else {
                    ColumnState::AtLower
                };
            }
            Some(r) => {
                let out = self.basic[r];
                let rate = -dir * self.t[(r, j)];
                self.state[out] = if rate < 0.0 {
                    ColumnState::AtLower
                } else {
                    ColumnState::AtUpper
                };
                self.pivot(r, j);
                self.beta[r] = entering_value;
            }
        }
        Step::Continue
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let piv = self.t[(r, j)];
        for v in self.t.row_mut(r) {
            *v /= piv;
        }
        let prow: Vec<f64> = self.t.row(r).to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[(i, j)];
            if f != 0.0 {
                for (v, p) in self.t.row_mut(i).iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                self.t[(i, j)] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (v, p) in self.d.iter_mut().zip(&prow) {
                *v -= f * p;
            }
        }
        self.d[j] = 0.0;
        self.basic[r] = j;
        self.state[j] = ColumnState::Basic;
    }

    fn run(&mut self, max_pivots: usize) -> Result<Step> {
        loop {
            if self.pivots > max_pivots {
                return Err(Error::NumericalFailure(format!(
                    "simplex exceeded {max_pivots} pivots"
                )));
            }
            match self.step() {
                Step::Continue => continue,
                other => return Ok(other),
            }
        }
    }

    /// Recomputes basic values from the basis inverse carried in the
    /// initial-basis columns, removing drift accumulated by pivoting.
    fn refresh_basic_values(&mut self, lp: &LinearProgram) {
        let mut rhs = lp.b.clone();
        for j in 0..self.n {
            if self.state[j] != ColumnState::Basic {
                let v = self.value_of(j);
                if v != 0.0 {
                    for (i, ri) in rhs.iter_mut().enumerate() {
                        *ri -= lp.a[(i, j)] * v;
                    }
                }
            }
        }
        for i in 0..self.m {
            let s = self.n + i;
            if self.state[s] != ColumnState::Basic {
                let v = self.value_of(s);
                rhs[i] -= v;
            }
        }
        for r in 0..self.m {
            let mut v = 0.0;
            for (i, &(col, sign)) in self.init_col.iter().enumerate() {
                v += self.t[(r, col)] * sign * rhs[i];
            }
            // artificial columns that stayed at a nonzero bound cannot occur
            // after a successful phase one; they are fixed at zero.
            self.beta[r] = v;
        }
    }

    fn structural_solution(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.n).map(|j| self.value_of(j)).collect();
        for r in 0..self.m {
            if self.basic[r] < self.n {
                x[self.basic[r]] = self.beta[r];
            }
        }
        x
    }
}

fn nonbasic_value(state: ColumnState, lower: f64, upper: f64) -> f64 {
    match state {
        ColumnState::AtLower => lower,
        ColumnState::AtUpper => upper,
        ColumnState::FreeZero | ColumnState::Basic => 0.0,
    }
}

/// Solves `lp`; `Err` only on a numerical stall.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult> {
    solve_lp_with_tableau(lp).map(|(r, _)| r)
}

/// Like [`solve_lp`] but also returns the optimal tableau.
pub fn solve_lp_with_tableau(lp: &LinearProgram) -> Result<(LpResult, Option<FinalTableau>)> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.num_rows();
    let scale = 1.0 + lp.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut tab = Tableau::new(lp);
    let max_pivots = 200 * (n + m) + 5000;

    if tab.has_artificials() {
        tab.run(max_pivots)?;
        tab.refresh_basic_values(lp);
        if tab.objective() > 1e-9 * scale {
            return Ok((LpResult::without_solution(LpStatus::Infeasible, n, m), None));
        }
        for j in n + m..tab.ncols {
            tab.upper[j] = 0.0;
            if tab.state[j] != ColumnState::Basic {
                tab.state[j] = ColumnState::AtLower;
            }
        }
    }

    tab.cost = vec![0.0; tab.ncols];
    tab.cost[..n].copy_from_slice(&lp.objective);
    tab.recompute_reduced_costs();
    tab.degenerate = 0;
    match tab.run(max_pivots)? {
        Step::Unbounded => {
            return Ok((LpResult::without_solution(LpStatus::Unbounded, n, m), None))
        }
        Step::Optimal | Step::Continue => {}
    }
    tab.refresh_basic_values(lp);

    let x = tab.structural_solution();
    let viol = lp.max_violation(&x);
    if viol > 1e-6 * scale {
        return Err(Error::NumericalFailure(format!(
            "simplex returned a point violating constraints by {viol:e}"
        )));
    }
    let objective = dot(&lp.objective, &x);
    let row_duals: Vec<f64> = (0..m).map(|i| -tab.d[n + i]).collect();
    let reduced_costs = tab.d[..n].to_vec();

    let width = n + m;
    let mut rows = DenseMatrix::zeros(m, width);
    for r in 0..m {
        rows.row_mut(r).copy_from_slice(&tab.t.row(r)[..width]);
    }
    let final_tab = FinalTableau {
        num_structural: n,
        basic: tab.basic.clone(),
        rows,
        basic_values: tab.beta.clone(),
        states: tab.state[..width].to_vec(),
        lower: tab.lower[..width].to_vec(),
        upper: tab.upper[..width].to_vec(),
    };
    Ok((
        LpResult {
            status: LpStatus::Optimal,
            x,
            objective,
            row_duals,
            reduced_costs,
        },
        Some(final_tab),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blue_relaxation() -> LinearProgram {
        LinearProgram::new(
            vec![1.0, -2.0],
            DenseMatrix::from_rows(2, &[vec![3.0, 4.0]]).unwrap(),
            vec![5.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn bound_attained_optimum() {
        let lp = LinearProgram::bounds_only(vec![-1.0], vec![0.0], vec![1.0]).unwrap();
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.x, vec![1.0]);
        assert_eq!(r.objective, -1.0);
    }

    #[test]
    fn blue_relaxation_vertex() {
        // oracle: enumerate the five vertices of the relaxation
        let lp = blue_relaxation();
        let verts = [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 0.5],
            [1.0 / 3.0, 1.0],
        ];
        let best = verts
            .iter()
            .map(|v| dot(&lp.objective, v))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, -2.0);
        let r = solve_lp(&lp).unwrap();
        assert!((r.objective - best).abs() < 1e-12);
        assert!((r.x[0] - 0.0).abs() < 1e-12 && (r.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_bounds_and_rows() {
        // x <= -1, x >= 0
        let lp = LinearProgram::new(
            vec![0.0],
            DenseMatrix::from_rows(1, &[vec![1.0]]).unwrap(),
            vec![-1.0],
            vec![0.0],
            vec![f64::INFINITY],
        )
        .unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let lp = LinearProgram::bounds_only(vec![-1.0], vec![0.0], vec![f64::INFINITY]).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y  s.t. x - y = 1, x + y >= 2 (as -x - y <= -2), free vars
        let mut lp = LinearProgram::bounds_only(
            vec![1.0, 1.0],
            vec![f64::NEG_INFINITY; 2],
            vec![f64::INFINITY; 2],
        )
        .unwrap();
        lp.add_row(&[1.0, -1.0], RowSense::Eq, 1.0).unwrap();
        lp.add_row(&[-1.0, -1.0], RowSense::Le, -2.0).unwrap();
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 2.0).abs() < 1e-9);
        assert!((r.x[0] - 1.5).abs() < 1e-9 && (r.x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn duals_certify_optimum() {
        let lp = blue_relaxation();
        let r = solve_lp(&lp).unwrap();
        assert!((r.dual_objective(&lp) - r.objective).abs() < 1e-9);
        assert!(r.row_duals.iter().all(|y| *y <= 1e-12));
    }

    #[test]
    fn malformed_program_rejected() {
        let bad = LinearProgram::new(
            vec![1.0, 1.0],
            DenseMatrix::zeros(0, 2),
            vec![],
            vec![0.0],
            vec![1.0, 1.0],
        );
        assert!(bad.is_err());
        let inverted = LinearProgram::bounds_only(vec![1.0], vec![2.0], vec![1.0]);
        assert!(inverted.is_err());
    }
}
