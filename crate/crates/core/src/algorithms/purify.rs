//! Moves a certified mixed equilibrium to an extreme one.
//!
//! Player by player, the mixture over the current support is replaced by a
//! basic solution of the LP "every other player's support stays optimal".
//! Optimality over the full feasible set is enforced by row generation: a
//! best-response IP either confirms the candidate or yields a new
//! constraint. The result is a vertex of each player's best-response
//! polytope, hence an extreme equilibrium.

use crate::error::Result;
use crate::game::{GameModel, MixedStrategy, StrategyProfile};
use crate::lp::{solve_ip, solve_lp, LinearProgram, LpStatus, RowSense, SearchBudget};
use crate::numerics::dot;

const ROUNDS: usize = 50;

/// Merges repeated points of a support.
fn merged(support: &[(f64, Vec<f64>)]) -> Vec<(f64, Vec<f64>)> {
    let mut out: Vec<(f64, Vec<f64>)> = Vec::new();
    for (w, x) in support {
        match out
            .iter_mut()
            .find(|(_, y)| y.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-9))
        {
            Some((wy, _)) => *wy += w,
            None => out.push((*w, x.clone())),
        }
    }
    out
}

/// Returns `None` when a step fails; the caller keeps the input profile.
pub(super) fn purify(
    g: &GameModel,
    profile: &StrategyProfile,
    eps: f64,
    zero_eps: f64,
    budget: SearchBudget,
) -> Result<Option<StrategyProfile>> {
    let mut supports: Vec<Vec<(f64, Vec<f64>)>> = Vec::with_capacity(g.num_players());
    for s in &profile.strategies {
        match &s.support {
            Some(sup) => supports.push(merged(sup)),
            None => return Ok(None),
        }
    }
    for i in 0..g.num_players() {
        if supports[i].len() <= 1 {
            continue;
        }
        match purify_player(g, &supports, i, eps, zero_eps, budget)? {
            Some(s) => supports[i] = s,
            None => return Ok(None),
        }
    }
    let strategies = supports
        .into_iter()
        .map(MixedStrategy::from_support)
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(StrategyProfile { strategies }))
}

fn barycenter(support: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let mut b = vec![0.0; support[0].1.len()];
    for (w, x) in support {
        for (bi, xi) in b.iter_mut().zip(x) {
            *bi += w * xi;
        }
    }
    b
}

fn purify_player(
    g: &GameModel,
    supports: &[Vec<(f64, Vec<f64>)>],
    i: usize,
    eps: f64,
    zero_eps: f64,
    budget: SearchBudget,
) -> Result<Option<Vec<(f64, Vec<f64>)>>> {
    let points: Vec<Vec<f64>> = supports[i].iter().map(|(_, x)| x.clone()).collect();
    let k = points.len();
    let mut bary: Vec<Vec<f64>> = supports.iter().map(|s| barycenter(s)).collect();
    // per opponent j: cost vectors d_j when player i plays each point
    let mut costs: Vec<Option<Vec<Vec<f64>>>> = vec![None; g.num_players()];
    for j in (0..g.num_players()).filter(|&j| j != i) {
        let mut per_point = Vec::with_capacity(k);
        for x in &points {
            bary[i] = x.clone();
            per_point.push(
                g.player(j)
                    .parametrized_objective(&g.opponents_vector(&bary, j)?)?,
            );
        }
        costs[j] = Some(per_point);
    }
    // candidate deviations per opponent, grown by row generation
    let mut rivals: Vec<Vec<Vec<f64>>> = vec![Vec::new(); g.num_players()];

    for _ in 0..ROUNDS {
        let mut lp = LinearProgram::bounds_only(vec![0.0; k], vec![0.0; k], vec![1.0; k])?;
        lp.add_row(&vec![1.0; k], RowSense::Eq, 1.0)?;
        for j in (0..g.num_players()).filter(|&j| j != i) {
            let d = costs[j].as_ref().expect("set for every opponent");
            let reference = &supports[j][0].1;
            // Σ_k w_k d_jk·(s − r) = 0 for support points, ≤ 0 for r − t
            let row_for = |a: &[f64], b: &[f64]| -> Vec<f64> {
                d.iter().map(|dk| dot(dk, a) - dot(dk, b)).collect()
            };
            for (_, s) in supports[j].iter().skip(1) {
                let row = row_for(s, reference);
                lp.add_row(&row, RowSense::Le, eps)?;
                let neg: Vec<f64> = row.iter().map(|v| -v).collect();
                lp.add_row(&neg, RowSense::Le, eps)?;
            }
            for t in &rivals[j] {
                lp.add_row(&row_for(reference, t), RowSense::Le, eps)?;
            }
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Ok(None);
        }
        let mut support: Vec<(f64, Vec<f64>)> = sol
            .x
            .iter()
            .zip(&points)
            .filter(|(w, _)| **w > zero_eps)
            .map(|(w, x)| (*w, x.clone()))
            .collect();
        let total: f64 = support.iter().map(|(w, _)| w).sum();
        for (w, _) in support.iter_mut() {
            *w /= total;
        }
        bary[i] = barycenter(&support);

        let mut added = false;
        for j in (0..g.num_players()).filter(|&j| j != i) {
            let opp = g.opponents_vector(&bary, j)?;
            let best = solve_ip(g.player(j), &opp, budget)?;
            if best.status != LpStatus::Optimal {
                return Ok(None);
            }
            let current = g.player(j).payoff(&supports[j][0].1, &opp)?;
            if best.objective < current - eps {
                rivals[j].push(best.x);
                added = true;
            }
        }
        if !added {
            return Ok(Some(support));
        }
    }
    Ok(None)
}
