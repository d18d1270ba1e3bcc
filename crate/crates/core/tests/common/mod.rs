//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use rbgame::lp::{solve_lp, LinearProgram, LpStatus, PlayerProgram, RowSense};
use rbgame::numerics::{DenseMatrix, SeededRng};
use rbgame::poly::Polyhedron;

/// Every 0/1 point satisfying `A x ≤ b`, checked directly on the triplets.
pub fn binary_points(p: &PlayerProgram) -> Vec<Vec<f64>> {
    let m = p.num_vars();
    assert!(m <= 20, "too many variables to enumerate");
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let x: Vec<f64> = (0..m).map(|j| f64::from((mask >> j) & 1)).collect();
        let mut lhs = vec![0.0; p.rhs().len()];
        for (r, c, v) in p.constraints().triplets() {
            lhs[r] += v * x[c];
        }
        if lhs.iter().zip(p.rhs()).all(|(l, b)| *l <= b + 1e-9) {
            out.push(x);
        }
    }
    out
}

/// Minimum of `objective · x` over the binary points, by enumeration.
pub fn lattice_minimum(p: &PlayerProgram, objective: &[f64]) -> Option<f64> {
    binary_points(p)
        .iter()
        .map(|x| x.iter().zip(objective).map(|(a, b)| a * b).sum::<f64>())
        .min_by(f64::total_cmp)
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Vertices of a bounded polyhedron: every feasible point where `dim`
/// linearly independent constraints are tight.
pub fn polytope_vertices(p: &Polyhedron) -> Vec<Vec<f64>> {
    let d = p.dim();
    let mut rows: Vec<(Vec<f64>, f64)> = p
        .a()
        .rows()
        .map(|r| r.to_vec())
        .zip(p.b().iter().copied())
        .collect();
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        rows.push((e.clone(), p.upper()[j]));
        e[j] = -1.0;
        rows.push((e, -p.lower()[j]));
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for s in subsets(rows.len(), d) {
        let a = s.iter().map(|&i| rows[i].0.clone()).collect();
        let b = s.iter().map(|&i| rows[i].1).collect();
        if let Some(v) = solve_square(a, b) {
            if p.contains(&v, 1e-9)
                && !out
                    .iter()
                    .any(|w| w.iter().zip(&v).all(|(x, y)| (x - y).abs() < 1e-9))
            {
                out.push(v);
            }
        }
    }
    out
}

/// Whether `x` is a convex combination of `vertices`.
pub fn in_vertex_hull(vertices: &[Vec<f64>], x: &[f64], eps: f64) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let k = vertices.len();
    let mut lp =
        LinearProgram::bounds_only(vec![0.0; k], vec![0.0; k], vec![f64::INFINITY; k]).unwrap();
    lp.add_row(&vec![1.0; k], RowSense::Eq, 1.0).unwrap();
    for (j, xj) in x.iter().enumerate() {
        let row: Vec<f64> = vertices.iter().map(|v| v[j]).collect();
        lp.add_row(&row, RowSense::Le, xj + eps).unwrap();
        let neg: Vec<f64> = row.iter().map(|v| -v).collect();
        lp.add_row(&neg, RowSense::Le, -xj + eps).unwrap();
    }
    solve_lp(&lp).unwrap().status == LpStatus::Optimal
}

/// A box with integer corners in `[0, 4]^d`, optionally cut by one row
/// through its center.
pub fn random_piece(rng: &mut SeededRng, d: usize) -> Polyhedron {
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for _ in 0..d {
        let a = rng.random_range(0..=4) as f64;
        let b = rng.random_range(0..=4) as f64;
        lower.push(a.min(b));
        upper.push(a.max(b));
    }
    let mut a = DenseMatrix::zeros(0, d);
    let mut b = Vec::new();
    if rng.random_bool(0.5) {
        let row: Vec<f64> = (0..d).map(|_| rng.random_range(-2..=2) as f64).collect();
        let center: f64 = row
            .iter()
            .zip(lower.iter().zip(&upper))
            .map(|(r, (l, u))| r * (l + u) / 2.0)
            .sum();
        a.push_row(&row).unwrap();
        b.push(center);
    }
    Polyhedron::new(a, b, lower, upper).unwrap()
}

pub fn max_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            assert_eq!(x.len(), y.len());
            x.iter().zip(y).map(|(u, v)| (u - v).abs())
        })
        .fold(0.0, f64::max)
}
