//! Polyhedra and the convex hull of a finite union of bounded polyhedra.
//!
//! The hull is kept in its lifted (disjunctive) form: one scaled copy
//! `yᵏ` of the variables and one multiplier `λₖ` per piece, with
//!
//! ```text
//! x = Σₖ yᵏ,   Aₖ yᵏ ≤ bₖ λₖ,   lbₖ λₖ ≤ yᵏ ≤ ubₖ λₖ,   Σₖ λₖ = 1,   λ ≥ 0.
//! ```
//!
//! Membership and optimization are LPs over the lifted variables.

use crate::error::{ensure_dim, usage, Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, RowSense};
use crate::numerics::{check_finite, dot, DenseMatrix};

/// `{x : A x ≤ b, lb ≤ x ≤ ub}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    a: DenseMatrix,
    b: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Polyhedron {
    pub fn new(a: DenseMatrix, b: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        ensure_dim("columns of A", dim, a.ncols())?;
        ensure_dim("rows of A vs b", a.nrows(), b.len())?;
        ensure_dim("upper bounds", dim, upper.len())?;
        check_finite("b", &b)?;
        if !a.is_finite() {
            return Err(usage("polyhedron matrix has a non-finite entry"));
        }
        if lower.iter().chain(&upper).any(|v| v.is_nan()) {
            return Err(usage("polyhedron bound is NaN"));
        }
        Ok(Polyhedron { a, b, lower, upper })
    }

    /// The box `[lower, upper]`.
    pub fn bounds_only(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        Self::new(DenseMatrix::zeros(0, dim), vec![], lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    /// `A x ≤ b + eps` and `lb − eps ≤ x ≤ ub + eps`.
    pub fn contains(&self, x: &[f64], eps: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        self.a
            .rows()
            .zip(&self.b)
            .all(|(r, bi)| dot(r, x) <= bi + eps)
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l - eps && *v <= u + eps)
    }

    pub fn with_row(&self, row: &[f64], rhs: f64) -> Result<Polyhedron> {
        ensure_dim("added row", self.dim(), row.len())?;
        let mut p = self.clone();
        p.a.push_row(row)?;
        p.b.push(rhs);
        Ok(p)
    }

    pub fn with_bounds(&self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Polyhedron> {
        Polyhedron::new(self.a.clone(), self.b.clone(), lower, upper)
    }

    pub fn linear_program(&self, objective: Vec<f64>) -> Result<LinearProgram> {
        ensure_dim("objective", self.dim(), objective.len())?;
        LinearProgram::new(
            objective,
            self.a.clone(),
            self.b.clone(),
            self.lower.clone(),
            self.upper.clone(),
        )
    }

    /// `min objective·x` over the polyhedron.
    pub fn minimize(&self, objective: &[f64]) -> Result<crate::lp::LpResult> {
        solve_lp(&self.linear_program(objective.to_vec())?)
    }

    pub fn is_empty(&self) -> Result<bool> {
        if self.lower.iter().zip(&self.upper).any(|(l, u)| l > u) {
            return Ok(true);
        }
        Ok(self.minimize(&vec![0.0; self.dim()])?.status == LpStatus::Infeasible)
    }

    /// True when every coordinate is bounded on a nonempty polyhedron.
    pub fn is_bounded(&self) -> Result<bool> {
        let n = self.dim();
        for j in 0..n {
            if self.lower[j].is_finite() && self.upper[j].is_finite() {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; n];
                c[j] = sign;
                if self.minimize(&c)?.status == LpStatus::Unbounded {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Activity-based bound propagation, rounding bounds of the listed
    /// integer coordinates. Returns `None` when the propagation proves the
    /// polyhedron has no point with those coordinates integral.
    pub fn tightened(&self, integers: &[usize]) -> Option<Polyhedron> {
        let n = self.dim();
        let mut lo = self.lower.clone();
        let mut hi = self.upper.clone();
        let mut is_int = vec![false; n];
        for &j in integers {
            is_int[j] = true;
            lo[j] = (lo[j] - 1e-9).ceil();
            hi[j] = (hi[j] + 1e-9).floor();
            if lo[j] > hi[j] {
                return None;
            }
        }
        for _ in 0..20 {
            let mut changed = false;
            for (row, &bi) in self.a.rows().zip(&self.b) {
                let mins: Vec<f64> = row
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| {
                        if a > 0.0 {
                            a * lo[k]
                        } else if a < 0.0 {
                            a * hi[k]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let infinite = mins.iter().filter(|v| !v.is_finite()).count();
                if infinite > 1 {
                    continue;
                }
                let finite_sum: f64 = mins.iter().filter(|v| v.is_finite()).sum();
                for (j, &a) in row.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    let rest = if mins[j].is_finite() {
                        if infinite > 0 {
                            continue;
                        }
                        finite_sum - mins[j]
                    } else {
                        finite_sum
                    };
                    let limit = (bi - rest) / a;
                    if a > 0.0 {
                        let new = if is_int[j] {
                            (limit + 1e-9).floor()
                        } else {
                            limit
                        };
                        if new < hi[j] - 1e-9 {
                            hi[j] = new;
                            changed = true;
                        }
                    } else {
                        let new = if is_int[j] {
                            (limit - 1e-9).ceil()
                        } else {
                            limit
                        };
                        if new > lo[j] + 1e-9 {
                            lo[j] = new;
                            changed = true;
                        }
                    }
                    if lo[j] > hi[j] + 1e-9 {
                        return None;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for j in 0..n {
            if lo[j] > hi[j] {
                // within tolerance: collapse
                hi[j] = lo[j];
            }
        }
        Some(Polyhedron {
            a: self.a.clone(),
            b: self.b.clone(),
            lower: lo,
            upper: hi,
        })
    }
}

/// `x = E u + offset` with `u ≥ 0` and `G u ≤ h`: a region written over
/// nonnegative variables, as the complementarity formulation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegForm {
    pub embed: DenseMatrix,
    pub offset: Vec<f64>,
    pub rows: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl NonnegForm {
    pub fn num_vars(&self) -> usize {
        self.embed.ncols()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn point(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.embed.mul_vec(u)?;
        for (xi, o) in x.iter_mut().zip(&self.offset) {
            *xi += o;
        }
        Ok(x)
    }
}

/// Columns substituting one (possibly scaled) copy of a polyhedron's
/// variables by nonnegative ones: `y_j = bound_j·s + t_j` or a split.
struct Substitution {
    /// For each original coordinate: (column indices, signs).
    cols: Vec<Vec<(usize, f64)>>,
    /// Per coordinate, the anchor bound multiplied by the scale variable.
    anchor: Vec<f64>,
    /// `(column, ub − lb)` rows needed to cap shifted variables.
    caps: Vec<(usize, f64)>,
}

fn substitute(p: &Polyhedron, first_col: usize) -> Substitution {
    let mut next = first_col;
    let mut cols = Vec::with_capacity(p.dim());
    let mut anchor = Vec::with_capacity(p.dim());
    let mut caps = Vec::new();
    for j in 0..p.dim() {
        let (l, u) = (p.lower[j], p.upper[j]);
        if l.is_finite() {
            cols.push(vec![(next, 1.0)]);
            anchor.push(l);
            if u.is_finite() {
                caps.push((next, u - l));
            }
            next += 1;
        } else if u.is_finite() {
            cols.push(vec![(next, -1.0)]);
            anchor.push(u);
            next += 1;
        } else {
            cols.push(vec![(next, 1.0), (next + 1, -1.0)]);
            anchor.push(0.0);
            next += 2;
        }
    }
    Substitution { cols, anchor, caps }
}

impl Substitution {
    fn width(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }
}

impl Polyhedron {
    /// Lower bounds become shifts, upper bounds explicit rows, free
    /// variables are split.
    pub fn nonneg_form(&self) -> Result<NonnegForm> {
        let dim = self.dim();
        let sub = substitute(self, 0);
        let nu = sub.width();
        let mut embed = DenseMatrix::zeros(dim, nu);
        for (j, cs) in sub.cols.iter().enumerate() {
            for &(c, s) in cs {
                embed[(j, c)] = s;
            }
        }
        let offset = sub.anchor.clone();
        let mut rows = DenseMatrix::zeros(0, nu);
        let mut rhs = Vec::new();
        for (r, &bi) in self.a.rows().zip(&self.b) {
            let mut g = vec![0.0; nu];
            for (j, cs) in sub.cols.iter().enumerate() {
                for &(c, s) in cs {
                    g[c] += r[j] * s;
                }
            }
            rows.push_row(&g)?;
            rhs.push(bi - dot(r, &offset));
        }
        for &(c, width) in &sub.caps {
            let mut g = vec![0.0; nu];
            g[c] = 1.0;
            rows.push_row(&g)?;
            rhs.push(width);
        }
        Ok(NonnegForm {
            embed,
            offset,
            rows,
            rhs,
        })
    }
}

/// Convex hull of a union of bounded polyhedra, in lifted form.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedHull {
    dim: usize,
    pieces: Vec<Polyhedron>,
}

/// Builds the hull of `pieces`. Empty pieces are dropped; unbounded ones
/// are rejected.
pub fn convex_hull(pieces: &[Polyhedron]) -> Result<ExtendedHull> {
    let first = pieces
        .first()
        .ok_or_else(|| usage("convex hull needs at least one piece"))?;
    let dim = first.dim();
    let mut kept = Vec::with_capacity(pieces.len());
    for (k, p) in pieces.iter().enumerate() {
        ensure_dim(&format!("piece {k}"), dim, p.dim())?;
        if p.is_empty()? {
            continue;
        }
        if !p.is_bounded()? {
            return Err(Error::UnboundedPiece(k));
        }
        kept.push(p.clone());
    }
    if kept.is_empty() {
        return Err(Error::EmptyUnion);
    }
    Ok(ExtendedHull { dim, pieces: kept })
}

impl ExtendedHull {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonempty pieces, in input order.
    pub fn pieces(&self) -> &[Polyhedron] {
        &self.pieces
    }

    /// Lifted LP over `(y¹ … yᴷ, λ)` with `x = Σ yᵏ` pinned to `x ± eps`
    /// when `target` is given (exactly when `eps` is zero).
    fn lifted_lp(&self, target: Option<(&[f64], f64)>) -> Result<LinearProgram> {
        let k = self.pieces.len();
        let n = self.dim;
        let nv = k * n + k;
        let lam = |p: usize| k * n + p;
        let mut lower = vec![f64::NEG_INFINITY; nv];
        let upper = vec![f64::INFINITY; nv];
        for l in lower.iter_mut().skip(k * n) {
            *l = 0.0;
        }
        let mut lp = LinearProgram::bounds_only(vec![0.0; nv], lower, upper)?;
        for (p, piece) in self.pieces.iter().enumerate() {
            for (r, &bi) in piece.a.rows().zip(&piece.b) {
                let mut row = vec![0.0; nv];
                row[p * n..(p + 1) * n].copy_from_slice(r);
                row[lam(p)] = -bi;
                lp.add_row(&row, RowSense::Le, 0.0)?;
            }
            for j in 0..n {
                if piece.upper[j].is_finite() {
                    let mut row = vec![0.0; nv];
                    row[p * n + j] = 1.0;
                    row[lam(p)] = -piece.upper[j];
                    lp.add_row(&row, RowSense::Le, 0.0)?;
                }
                if piece.lower[j].is_finite() {
                    let mut row = vec![0.0; nv];
                    row[p * n + j] = -1.0;
                    row[lam(p)] = piece.lower[j];
                    lp.add_row(&row, RowSense::Le, 0.0)?;
                }
            }
        }
        let mut sum = vec![0.0; nv];
        for p in 0..k {
            sum[lam(p)] = 1.0;
        }
        lp.add_row(&sum, RowSense::Eq, 1.0)?;
        if let Some((x, eps)) = target {
            for j in 0..n {
                let mut row = vec![0.0; nv];
                for p in 0..k {
                    row[p * n + j] = 1.0;
                }
                if eps == 0.0 {
                    lp.add_row(&row, RowSense::Eq, x[j])?;
                    continue;
                }
                lp.add_row(&row, RowSense::Le, x[j] + eps)?;
                for v in row.iter_mut() {
                    *v = -*v;
                }
                lp.add_row(&row, RowSense::Le, -x[j] + eps)?;
            }
        }
        Ok(lp)
    }

    /// Lifted-feasibility test for `x`, within `eps` per coordinate.
    pub fn contains(&self, x: &[f64], eps: f64) -> Result<bool> {
        ensure_dim("point", self.dim, x.len())?;
        let lp = self.lifted_lp(Some((x, eps)))?;
        Ok(solve_lp(&lp)?.status == LpStatus::Optimal)
    }

    /// Writes `x` as a convex combination of points of the pieces.
    /// Multipliers at or below `zero_eps` are dropped.
    pub fn decompose(&self, x: &[f64], eps: f64, zero_eps: f64) -> Result<Vec<(f64, Vec<f64>)>> {
        Ok(self
            .decompose_indexed(x, eps, zero_eps)?
            .into_iter()
            .map(|(_, w, p)| (w, p))
            .collect())
    }

    /// Same as [`ExtendedHull::decompose`] but also reports which piece
    /// each point came from. `x` is matched exactly when possible, within
    /// `eps` otherwise.
    pub fn decompose_indexed(
        &self,
        x: &[f64],
        eps: f64,
        zero_eps: f64,
    ) -> Result<Vec<(usize, f64, Vec<f64>)>> {
        ensure_dim("point", self.dim, x.len())?;
        let mut sol = solve_lp(&self.lifted_lp(Some((x, 0.0)))?)?;
        if sol.status != LpStatus::Optimal {
            sol = solve_lp(&self.lifted_lp(Some((x, eps)))?)?;
        }
        if sol.status != LpStatus::Optimal {
            return Err(usage("decompose called on a point outside the hull"));
        }
        let n = self.dim;
        let k = self.pieces.len();
        let mut out = Vec::new();
        for p in 0..k {
            let w = sol.x[k * n + p];
            if w > zero_eps {
                let point: Vec<f64> = sol.x[p * n..(p + 1) * n].iter().map(|y| y / w).collect();
                out.push((p, w, point));
            }
        }
        let total: f64 = out.iter().map(|(_, w, _)| w).sum();
        for (_, w, _) in out.iter_mut() {
            *w /= total;
        }
        Ok(out)
    }

    /// `min objective·x` over the hull; returns `(value, x)`.
    pub fn minimize(&self, objective: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
        ensure_dim("objective", self.dim, objective.len())?;
        let mut lp = self.lifted_lp(None)?;
        let n = self.dim;
        let k = self.pieces.len();
        for p in 0..k {
            lp.objective[p * n..(p + 1) * n].copy_from_slice(objective);
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Ok(None);
        }
        let mut x = vec![0.0; n];
        for p in 0..k {
            for j in 0..n {
                x[j] += sol.x[p * n + j];
            }
        }
        Ok(Some((sol.objective, x)))
    }

    /// The hull over nonnegative variables: per piece the substituted
    /// copy plus its multiplier.
    pub fn nonneg_form(&self) -> Result<NonnegForm> {
        let n = self.dim;
        let mut subs = Vec::with_capacity(self.pieces.len());
        let mut lam_cols = Vec::with_capacity(self.pieces.len());
        let mut next = 0;
        for p in &self.pieces {
            let s = substitute(p, next);
            next += s.width();
            lam_cols.push(next);
            next += 1;
            subs.push(s);
        }
        let nu = next;
        let mut embed = DenseMatrix::zeros(n, nu);
        let mut rows = DenseMatrix::zeros(0, nu);
        let mut rhs = Vec::new();
        for ((piece, sub), &lc) in self.pieces.iter().zip(&subs).zip(&lam_cols) {
            for j in 0..n {
                for &(c, s) in &sub.cols[j] {
                    embed[(j, c)] = s;
                }
                embed[(j, lc)] = sub.anchor[j];
            }
            // Aₖ (anchor·λ + S t) ≤ bₖ λ
            for (r, &bi) in piece.a.rows().zip(&piece.b) {
                let mut g = vec![0.0; nu];
                for j in 0..n {
                    for &(c, s) in &sub.cols[j] {
                        g[c] += r[j] * s;
                    }
                }
                g[lc] = dot(r, &sub.anchor) - bi;
                rows.push_row(&g)?;
                rhs.push(0.0);
            }
            for &(c, width) in &sub.caps {
                let mut g = vec![0.0; nu];
                g[c] = 1.0;
                g[lc] = -width;
                rows.push_row(&g)?;
                rhs.push(0.0);
            }
        }
        let mut sum = vec![0.0; nu];
        for &lc in &lam_cols {
            sum[lc] = 1.0;
        }
        rows.push_row(&sum)?;
        rhs.push(1.0);
        for v in sum.iter_mut() {
            *v = -*v;
        }
        rows.push_row(&sum)?;
        rhs.push(-1.0);
        Ok(NonnegForm {
            embed,
            offset: vec![0.0; n],
            rows,
            rhs,
        })
    }
}

/// A player's region: either one polyhedron or the hull of several.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Polyhedron(Polyhedron),
    Hull(ExtendedHull),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Polyhedron(p) => p.dim(),
            Region::Hull(h) => h.dim(),
        }
    }

    pub fn contains(&self, x: &[f64], eps: f64) -> Result<bool> {
        match self {
            Region::Polyhedron(p) => Ok(p.contains(x, eps)),
            Region::Hull(h) => h.contains(x, eps),
        }
    }

    pub fn nonneg_form(&self) -> Result<NonnegForm> {
        match self {
            Region::Polyhedron(p) => p.nonneg_form(),
            Region::Hull(h) => h.nonneg_form(),
        }
    }

    /// Optimal value of `min objective·x` over the region, `None` if the
    /// region is empty or the LP is unbounded.
    pub fn minimize(&self, objective: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
        match self {
            Region::Polyhedron(p) => {
                let r = p.minimize(objective)?;
                Ok(r.is_optimal().then_some((r.objective, r.x)))
            }
            Region::Hull(h) => h.minimize(objective),
        }
    }
}

impl From<Polyhedron> for Region {
    fn from(p: Polyhedron) -> Self {
        Region::Polyhedron(p)
    }
}

impl From<ExtendedHull> for Region {
    fn from(h: ExtendedHull) -> Self {
        Region::Hull(h)
    }
}
