//! Best-bound branch-and-bound over [`solve_lp`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::simplex::{solve_lp, LinearProgram, LpResult, LpStatus};
use crate::error::{ensure_dim, Error, Result};

/// Integrality tolerance on integer-marked coordinates.
pub const INTEGRALITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchBudget {
    pub max_nodes: Option<usize>,
    pub deadline: Option<Instant>,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget::default()
    }

    pub fn with_deadline(deadline: Option<Instant>) -> Self {
        SearchBudget {
            max_nodes: None,
            deadline,
        }
    }

    pub(crate) fn exhausted(&self, nodes: usize) -> bool {
        self.max_nodes.is_some_and(|m| nodes >= m)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

struct Node {
    bound: f64,
    seq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // max-heap: smallest bound first, then oldest node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn fractionality(v: f64) -> f64 {
    let f = v - v.floor();
    f.min(1.0 - f)
}

/// Most fractional integer coordinate, ties to the lowest index.
pub fn most_fractional(x: &[f64], integers: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in integers {
        let f = fractionality(x[j]);
        if f > INTEGRALITY_EPS && best.is_none_or(|(bj, bf)| f > bf || (f == bf && j < bj)) {
            best = Some((j, f));
        }
    }
    best.map(|(j, _)| j)
}

/// Minimizes `lp` with the listed coordinates restricted to integers.
///
/// Returns `Optimal`, `Infeasible` or `Unbounded` (the last only when the
/// relaxation is unbounded). Running out of budget yields
/// [`Error::BudgetExhausted`] carrying the incumbent, if one was found.
pub fn solve_mip(lp: &LinearProgram, integers: &[usize], budget: SearchBudget) -> Result<LpResult> {
    lp.validate()?;
    for &j in integers {
        if j >= lp.num_vars() {
            return Err(crate::error::usage(format!(
                "integer index {j} out of range"
            )));
        }
    }
    let mut work = lp.clone();
    for &j in integers {
        work.lower[j] = work.lower[j].ceil();
        work.upper[j] = work.upper[j].floor();
    }
    if integers.iter().any(|&j| work.lower[j] > work.upper[j]) {
        return Ok(infeasible(lp));
    }

    let root = solve_lp(&work)?;
    let mut nodes = 1usize;
    match root.status {
        LpStatus::Infeasible => return Ok(root),
        LpStatus::Unbounded => return Ok(root),
        LpStatus::Optimal => {}
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node {
        bound: root.objective,
        seq,
        lower: work.lower.clone(),
        upper: work.upper.clone(),
        x: root.x,
    });

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            if node.bound >= best - 1e-9 {
                break;
            }
        }
        let Some(j) = most_fractional(&node.x, integers) else {
            let mut x = node.x;
            for &k in integers {
                x[k] = x[k].round();
            }
            let obj = crate::numerics::dot(&lp.objective, &x);
            if incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
                incumbent = Some((obj, x));
            }
            continue;
        };
        let v = node.x[j];
        for (lo, hi) in [(node.lower[j], v.floor()), (v.ceil(), node.upper[j])] {
            if lo > hi {
                continue;
            }
            if budget.exhausted(nodes) {
                return Err(Error::BudgetExhausted {
                    what: format!("branch-and-bound stopped after {nodes} nodes"),
                    incumbent: incumbent.map(|(_, x)| x),
                });
            }
            work.lower.clone_from(&node.lower);
            work.upper.clone_from(&node.upper);
            work.lower[j] = lo;
            work.upper[j] = hi;
            let child = solve_lp(&work)?;
            nodes += 1;
            if child.status != LpStatus::Optimal {
                continue;
            }
            if incumbent
                .as_ref()
                .is_some_and(|(best, _)| child.objective >= best - 1e-9)
            {
                continue;
            }
            seq += 1;
            heap.push(Node {
                bound: child.objective,
                seq,
                lower: work.lower.clone(),
                upper: work.upper.clone(),
                x: child.x,
            });
        }
    }

    match incumbent {
        Some((objective, x)) => Ok(LpResult {
            status: LpStatus::Optimal,
            x,
            objective,
            row_duals: vec![0.0; lp.num_rows()],
            reduced_costs: vec![0.0; lp.num_vars()],
        }),
        None => Ok(infeasible(lp)),
    }
}

fn infeasible(lp: &LinearProgram) -> LpResult {
    LpResult {
        status: LpStatus::Infeasible,
        x: vec![f64::NAN; lp.num_vars()],
        objective: f64::INFINITY,
        row_duals: vec![0.0; lp.num_rows()],
        reduced_costs: vec![0.0; lp.num_vars()],
    }
}

/// Best response of `p` against `opponents`: minimizes the parametrized
/// objective over the player's feasible set.
pub fn solve_ip(
    p: &super::PlayerProgram,
    opponents: &[f64],
    budget: SearchBudget,
) -> Result<LpResult> {
    ensure_dim("opponent vector", p.num_params(), opponents.len())?;
    let cost = p.parametrized_objective(opponents)?;
    let lp = p.linear_relaxation(cost)?;
    solve_mip(&lp, p.integers(), budget)
}
