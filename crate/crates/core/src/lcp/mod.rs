//! Linear complementarity problems: find `z ≥ 0` with `w = M z + q ≥ 0`
//! and `zᵀw = 0`.
//!
//! Two methods are provided. [`LcpMethod::Branching`] enumerates the
//! complementarity pairs with an LP at each node and is complete: when it
//! reports no solution, none exists. [`LcpMethod::Lemke`] runs
//! complementary pivoting with an all-ones covering vector; ray termination
//! is reported as an inconclusive failure.

mod branching;
mod lemke;

use std::time::Instant;

pub use branching::{solve_lcp_constrained, solve_lcp_with_fixings};

use crate::error::{ensure_dim, usage, Result};
use crate::numerics::{check_finite, DenseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Lcp {
    m: DenseMatrix,
    q: Vec<f64>,
}

impl Lcp {
    pub fn new(m: DenseMatrix, q: Vec<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(usage(format!(
                "LCP matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        ensure_dim("q", m.nrows(), q.len())?;
        check_finite("q", &q)?;
        if !m.is_finite() {
            return Err(usage("LCP matrix has a non-finite entry"));
        }
        Ok(Lcp { m, q })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn m(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `M z + q`.
    pub fn slack(&self, z: &[f64]) -> Vec<f64> {
        let mut w = self.m.mul_vec(z).expect("dimension checked by caller");
        for (wi, qi) in w.iter_mut().zip(&self.q) {
            *wi += qi;
        }
        w
    }

    /// Checks `z ≥ −eps`, `w ≥ −eps`, `Σ zⱼwⱼ ≤ n·eps`.
    pub fn is_solution(&self, z: &[f64], eps: f64) -> bool {
        if z.len() != self.dim() {
            return false;
        }
        let w = self.slack(z);
        z.iter().all(|v| *v >= -eps)
            && w.iter().all(|v| *v >= -eps)
            && z.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() <= self.dim() as f64 * eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LcpMethod {
    #[default]
    Branching,
    Lemke,
}

/// Per-index restriction used by the branching method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fixing {
    Free,
    /// `z_j = 0`.
    ZeroZ,
    /// `w_j = 0`.
    ZeroW,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcpSolution {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub method: LcpMethod,
    /// Branching nodes or Lemke pivots.
    pub work: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LcpOutcome {
    Solved(LcpSolution),
    /// `certified` is true only when the search proved there is no solution.
    NoSolution {
        certified: bool,
        work: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct LcpOptions {
    pub method: LcpMethod,
    pub max_nodes: Option<usize>,
    pub deadline: Option<Instant>,
    pub workers: usize,
    pub complementarity_eps: f64,
}

impl Default for LcpOptions {
    fn default() -> Self {
        LcpOptions {
            method: LcpMethod::Branching,
            max_nodes: None,
            deadline: None,
            workers: 1,
            complementarity_eps: 1e-7,
        }
    }
}

/// Solves `p` with the chosen method. Budget exhaustion is an error,
/// distinct from a (certified or inconclusive) `NoSolution`.
pub fn solve_lcp(p: &Lcp, opts: &LcpOptions) -> Result<LcpOutcome> {
    if let Some(sol) = trivial_solution(p, opts.method) {
        return Ok(LcpOutcome::Solved(sol));
    }
    match opts.method {
        LcpMethod::Branching => branching::solve(p, &[], opts),
        LcpMethod::Lemke => lemke::solve(p, opts),
    }
}

fn trivial_solution(p: &Lcp, method: LcpMethod) -> Option<LcpSolution> {
    p.q.iter().all(|v| *v >= 0.0).then(|| LcpSolution {
        z: vec![0.0; p.dim()],
        w: p.q.clone(),
        method,
        work: 0,
    })
}
