//! Lemke's complementary pivoting with covering vector `d = 1`.
//!
//! Tableau for `I w − M z − d z₀ = q`; columns are `w₁…wₙ, z₁…zₙ, z₀`.

use std::time::Instant;

use super::{Lcp, LcpMethod, LcpOptions, LcpOutcome, LcpSolution};
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

const PIVOT_TOL: f64 = 1e-11;

pub(super) fn solve(p: &Lcp, opts: &LcpOptions) -> Result<LcpOutcome> {
    let n = p.dim();
    let z0 = 2 * n;
    let ncols = 2 * n + 1;
    let mut t = DenseMatrix::zeros(n, ncols);
    let mut rhs = p.q.clone();
    for i in 0..n {
        t[(i, i)] = 1.0;
        for j in 0..n {
            t[(i, n + j)] = -p.m[(i, j)];
        }
        t[(i, z0)] = -1.0;
    }
    let mut basis: Vec<usize> = (0..n).collect();

    let inconclusive = |work| {
        Ok(LcpOutcome::NoSolution {
            certified: false,
            work,
        })
    };

    // z₀ enters at the row of the most negative q
    let mut leave_row = 0;
    for i in 1..n {
        if rhs[i] < rhs[leave_row] {
            leave_row = i;
        }
    }
    let mut entering = z0;
    let max_pivots = 50 * n + 100;
    let mut pivots = 0;
    loop {
        pivot(&mut t, &mut rhs, leave_row, entering);
        let leaving = basis[leave_row];
        basis[leave_row] = entering;
        pivots += 1;
        if leaving == z0 {
            break;
        }
        if pivots > max_pivots {
            return inconclusive(pivots);
        }
        if opts.deadline.is_some_and(|d| Instant::now() >= d)
            || opts.max_nodes.is_some_and(|m| pivots > m)
        {
            return Err(Error::BudgetExhausted {
                what: format!("Lemke stopped after {pivots} pivots"),
                incumbent: None,
            });
        }
        entering = complement(leaving, n);

        // min ratio over rows with positive column entry; prefer z₀ on ties
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            let a = t[(i, entering)];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = rhs[i].max(0.0) / a;
            let take = match best {
                None => true,
                Some((bi, br)) => {
                    if ratio < br - 1e-12 {
                        true
                    } else if ratio <= br + 1e-12 {
                        basis[i] == z0 || (basis[bi] != z0 && basis[i] < basis[bi])
                    } else {
                        false
                    }
                }
            };
            if take {
                best = Some((i, ratio));
            }
        }
        match best {
            Some((i, _)) => leave_row = i,
            None => return inconclusive(pivots),
        }
    }

    let mut z = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if (n..2 * n).contains(&b) {
            z[b - n] = rhs[r].max(0.0);
        }
    }
    let w = p.slack(&z);
    if !p.is_solution(&z, opts.complementarity_eps) {
        return inconclusive(pivots);
    }
    Ok(LcpOutcome::Solved(LcpSolution {
        z,
        w,
        method: LcpMethod::Lemke,
        work: pivots,
    }))
}

fn complement(var: usize, n: usize) -> usize {
    if var < n {
        var + n
    } else {
        var - n
    }
}

fn pivot(t: &mut DenseMatrix, rhs: &mut [f64], r: usize, c: usize) {
    let piv = t[(r, c)];
    for v in t.row_mut(r) {
        *v /= piv;
    }
    rhs[r] /= piv;
    let prow = t.row(r).to_vec();
    for i in 0..t.nrows() {
        if i == r {
            continue;
        }
        let f = t[(i, c)];
        if f != 0.0 {
            for (v, pv) in t.row_mut(i).iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            rhs[i] -= f * rhs[r];
        }
    }
}
