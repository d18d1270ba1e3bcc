//! Complementarity branching: depth-first search over `z_j = 0` /
//! `w_j = 0` fixings with an LP relaxation at every node.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::{Fixing, Lcp, LcpMethod, LcpOptions, LcpOutcome, LcpSolution};
use crate::error::{ensure_dim, Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, RowSense};

/// Extra linear equalities `a·z = b` imposed at every node.
pub type SideConstraint = (Vec<f64>, f64);

/// LP relaxation of a node: `z ≥ 0`, `w ≥ 0`, fixings enforced, minimizing
/// the sum of the unfixed `z_j + w_j`. Returns `None` when the node is
/// infeasible.
fn node_lp(
    p: &Lcp,
    fix: &[Fixing],
    side: &[SideConstraint],
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let n = p.dim();
    let mut objective = vec![0.0; n];
    for (j, f) in fix.iter().enumerate() {
        if *f == Fixing::Free {
            objective[j] += 1.0;
            for (o, mij) in objective.iter_mut().zip(p.m.row(j)) {
                *o += mij;
            }
        }
    }
    let upper = fix
        .iter()
        .map(|f| {
            if *f == Fixing::ZeroZ {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut lp = LinearProgram::bounds_only(objective, vec![0.0; n], upper)?;
    for (j, f) in fix.iter().enumerate() {
        let row = p.m.row(j);
        if *f == Fixing::ZeroW {
            lp.add_row(row, RowSense::Eq, -p.q[j])?;
        } else {
            let neg: Vec<f64> = row.iter().map(|v| -v).collect();
            lp.add_row(&neg, RowSense::Le, p.q[j])?;
        }
    }
    for (a, b) in side {
        lp.add_row(a, RowSense::Eq, *b)?;
    }
    let r = solve_lp(&lp)?;
    if r.status != LpStatus::Optimal {
        return Ok(None);
    }
    let mut z = r.x;
    for (zj, f) in z.iter_mut().zip(fix) {
        if *f == Fixing::ZeroZ {
            *zj = 0.0;
        }
    }
    let w = p.slack(&z);
    Ok(Some((z, w)))
}

/// Solves the node LP for an explicit fixing pattern. `None` means the
/// node is infeasible.
pub fn solve_lcp_with_fixings(p: &Lcp, fixings: &[Fixing]) -> Result<Option<LcpSolution>> {
    ensure_dim("fixings", p.dim(), fixings.len())?;
    Ok(node_lp(p, fixings, &[])?.map(|(z, w)| LcpSolution {
        z,
        w,
        method: LcpMethod::Branching,
        work: 1,
    }))
}

/// Branching search restricted to solutions that also satisfy the given
/// linear equalities on `z`.
pub fn solve_lcp_constrained(
    p: &Lcp,
    side: &[SideConstraint],
    opts: &LcpOptions,
) -> Result<LcpOutcome> {
    for (a, _) in side {
        ensure_dim("side constraint", p.dim(), a.len())?;
    }
    solve(p, side, opts)
}

enum Search {
    Found(Vec<f64>, Vec<f64>),
    Exhausted,
    Cancelled,
}

struct Ctx<'a> {
    p: &'a Lcp,
    side: &'a [SideConstraint],
    eps: f64,
    nodes: &'a AtomicUsize,
    max_nodes: Option<usize>,
    deadline: Option<Instant>,
    /// Lowest frontier index that already holds a solution.
    best: &'a AtomicUsize,
}

impl Ctx<'_> {
    fn tick(&self) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.max_nodes.is_some_and(|m| n > m)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
        {
            return Err(Error::BudgetExhausted {
                what: format!("complementarity branching stopped after {n} nodes"),
                incumbent: None,
            });
        }
        Ok(())
    }

    /// Evaluates a node: `Ok(None)` if infeasible, otherwise the relaxation
    /// and the branching index (None when complementary).
    fn evaluate(&self, fix: &[Fixing]) -> Result<Option<(Vec<f64>, Vec<f64>, Option<usize>)>> {
        self.tick()?;
        let Some((z, w)) = node_lp(self.p, fix, self.side)? else {
            return Ok(None);
        };
        let mut pick: Option<(usize, f64)> = None;
        for (j, f) in fix.iter().enumerate() {
            if *f != Fixing::Free {
                continue;
            }
            let v = (z[j] * w[j]).abs();
            if v > self.eps && pick.is_none_or(|(_, b)| v > b) {
                pick = Some((j, v));
            }
        }
        Ok(Some((z, w, pick.map(|(j, _)| j))))
    }

    fn polish(&self, z: Vec<f64>, w: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        let fix: Vec<Fixing> = z
            .iter()
            .zip(&w)
            .map(|(a, b)| if a <= b { Fixing::ZeroZ } else { Fixing::ZeroW })
            .collect();
        Ok(node_lp(self.p, &fix, self.side)?.unwrap_or((z, w)))
    }

    /// `count` receives the nodes evaluated by this call.
    fn dfs(&self, fix: &mut Vec<Fixing>, my_index: usize, count: &mut usize) -> Result<Search> {
        if self.best.load(Ordering::Relaxed) < my_index {
            return Ok(Search::Cancelled);
        }
        *count += 1;
        let Some((z, w, pick)) = self.evaluate(fix)? else {
            return Ok(Search::Exhausted);
        };
        let Some(j) = pick else {
            let (z, w) = self.polish(z, w)?;
            return Ok(Search::Found(z, w));
        };
        for side in [Fixing::ZeroZ, Fixing::ZeroW] {
            fix[j] = side;
            match self.dfs(fix, my_index, count)? {
                Search::Exhausted => continue,
                other => {
                    fix[j] = Fixing::Free;
                    return Ok(other);
                }
            }
        }
        fix[j] = Fixing::Free;
        Ok(Search::Exhausted)
    }
}

enum Entry {
    Open(Vec<Fixing>),
    Found(Vec<f64>, Vec<f64>),
}

pub(super) fn solve(p: &Lcp, side: &[SideConstraint], opts: &LcpOptions) -> Result<LcpOutcome> {
    let nodes = AtomicUsize::new(0);
    let best = AtomicUsize::new(usize::MAX);
    let ctx = Ctx {
        p,
        side,
        eps: opts.complementarity_eps,
        nodes: &nodes,
        max_nodes: opts.max_nodes,
        deadline: opts.deadline,
        best: &best,
    };
    let solved = |z, w, work| {
        Ok(LcpOutcome::Solved(LcpSolution {
            z,
            w,
            method: LcpMethod::Branching,
            work,
        }))
    };

    if opts.workers <= 1 {
        let mut fix = vec![Fixing::Free; p.dim()];
        let mut work = 0;
        return match ctx.dfs(&mut fix, 0, &mut work)? {
            Search::Found(z, w) => solved(z, w, work),
            Search::Exhausted | Search::Cancelled => Ok(LcpOutcome::NoSolution {
                certified: true,
                work,
            }),
        };
    }

    // Expand the top of the tree breadth-first, keeping depth-first order,
    // then explore the frontier concurrently. The accepted solution is the
    // first one in that order, so the result matches a sequential run.
    // Work counts the nodes a run with the same worker count must
    // evaluate, independent of thread timing.
    let mut work = 0;
    let target = 4 * opts.workers;
    let mut frontier = vec![Entry::Open(vec![Fixing::Free; p.dim()])];
    for _ in 0..p.dim() {
        let open = frontier
            .iter()
            .filter(|e| matches!(e, Entry::Open(_)))
            .count();
        if open == 0 || open >= target {
            break;
        }
        if matches!(frontier.first(), Some(Entry::Found(..))) {
            break;
        }
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for e in frontier {
            match e {
                Entry::Found(..) => next.push(e),
                Entry::Open(fix) => {
                    work += 1;
                    match ctx.evaluate(&fix)? {
                        None => {}
                        Some((z, w, None)) => {
                            let (z, w) = ctx.polish(z, w)?;
                            next.push(Entry::Found(z, w));
                        }
                        Some((_, _, Some(j))) => {
                            for s in [Fixing::ZeroZ, Fixing::ZeroW] {
                                let mut child = fix.clone();
                                child[j] = s;
                                next.push(Entry::Open(child));
                            }
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    if let Some(i) = frontier.iter().position(|e| matches!(e, Entry::Found(..))) {
        best.store(i, Ordering::Relaxed);
    }

    let results: Vec<Mutex<Option<(Result<Search>, usize)>>> =
        frontier.iter().map(|_| Mutex::new(None)).collect();
    let next_index = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..opts.workers {
            s.spawn(|| loop {
                let i = next_index.fetch_add(1, Ordering::Relaxed);
                if i >= frontier.len() {
                    break;
                }
                let Entry::Open(fix) = &frontier[i] else {
                    continue;
                };
                let mut fix = fix.clone();
                let mut count = 0;
                let r = ctx.dfs(&mut fix, i, &mut count);
                if matches!(r, Ok(Search::Found(..))) {
                    best.fetch_min(i, Ordering::Relaxed);
                }
                *results[i]
                    .lock()
                    .expect("no worker panics while holding the lock") = Some((r, count));
            });
        }
    });

    for (entry, slot) in frontier.into_iter().zip(results) {
        if let Entry::Found(z, w) = entry {
            return solved(z, w, work);
        }
        let (r, count) = slot
            .into_inner()
            .expect("workers joined")
            .unwrap_or((Ok(Search::Cancelled), 0));
        work += count;
        match r {
            Ok(Search::Found(z, w)) => return solved(z, w, work),
            Ok(Search::Exhausted) => continue,
            Err(e) => return Err(e),
            Ok(Search::Cancelled) => {
                unreachable!("entries before the accepted one are always explored")
            }
        }
    }
    Ok(LcpOutcome::NoSolution {
        certified: true,
        work,
    })
}
