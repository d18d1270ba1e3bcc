//! Exhaustive equilibrium search for small pure-integer games: every pure
//! profile is checked, and two-player games additionally get all extreme
//! equilibria of the induced bimatrix game.

use std::time::Instant;

use super::SolverOptions;
use crate::error::{usage, Error, Result};
use crate::game::{
    EquilibriumResult, EquilibriumStatus, GameModel, MixedStrategy, SolveStats, StrategyProfile,
};
use crate::lp::PlayerProgram;
use crate::numerics::dot;

/// Largest number of pure profiles (and of lattice points per player).
pub const MAX_PROFILES: usize = 1 << 20;

/// Support pairs visited by the two-player mixed search.
const MAX_SUPPORT_PAIRS: u128 = 1 << 24;

const SOLVE_EPS: f64 = 1e-9;

/// Feasible integer points of a pure-integer player, in lexicographic
/// order of the coordinates.
pub fn pure_strategies(p: &PlayerProgram) -> Result<Vec<Vec<f64>>> {
    if !p.is_pure_integer() {
        return Err(usage(format!(
            "player {} has continuous variables; enumeration needs a finite strategy set",
            p.name()
        )));
    }
    let lo: Vec<i64> = p.lower().iter().map(|v| v.ceil() as i64).collect();
    let hi: Vec<i64> = p.upper().iter().map(|v| v.floor() as i64).collect();
    let mut count: u128 = 1;
    for (l, h) in lo.iter().zip(&hi) {
        if h < l {
            return Ok(Vec::new());
        }
        count = count.saturating_mul((h - l + 1) as u128);
        if count > MAX_PROFILES as u128 {
            return Err(Error::BudgetExhausted {
                what: format!(
                    "player {} has more than {MAX_PROFILES} lattice points",
                    p.name()
                ),
                incumbent: None,
            });
        }
    }
    let m = p.num_vars();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let x: Vec<f64> = cur.iter().map(|&v| v as f64).collect();
        if p.is_feasible(&x, 1e-9) {
            out.push(x);
        }
        // odometer, last coordinate fastest
        let mut k = m;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if cur[k] < hi[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = lo[k];
        }
    }
}

fn better(candidate: f64, current: f64) -> bool {
    candidate < current - 1e-12 * (1.0 + current.abs())
}

/// All pure equilibria, then (two players only) every extreme mixed
/// equilibrium, deduplicated by barycenters.
pub fn full_enumeration(g: &GameModel, opts: &SolverOptions) -> Result<Vec<EquilibriumResult>> {
    let start = Instant::now();
    let deadline = opts.time_limit.map(|t| start + t);
    let check_deadline = || -> Result<()> {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::BudgetExhausted {
                what: "time limit reached during enumeration".into(),
                incumbent: None,
            });
        }
        Ok(())
    };
    let sets: Vec<Vec<Vec<f64>>> = g
        .players()
        .iter()
        .map(pure_strategies)
        .collect::<Result<_>>()?;
    if let Some(i) = sets.iter().position(Vec::is_empty) {
        return Err(Error::Infeasible(format!(
            "player {} has no feasible strategy",
            g.player(i).name()
        )));
    }
    let total = sets.iter().try_fold(1usize, |acc, s| {
        acc.checked_mul(s.len()).filter(|t| *t <= MAX_PROFILES)
    });
    if total.is_none() {
        return Err(Error::BudgetExhausted {
            what: format!("more than {MAX_PROFILES} pure profiles"),
            incumbent: None,
        });
    }

    let mut found: Vec<StrategyProfile> = Vec::new();
    let n = g.num_players();
    let mut idx = vec![0usize; n];
    let mut visited = 0usize;
    'profiles: loop {
        visited += 1;
        if visited.is_multiple_of(4096) {
            check_deadline()?;
        }
        let prof: Vec<Vec<f64>> = idx.iter().zip(&sets).map(|(&k, s)| s[k].clone()).collect();
        let mut stable = true;
        for i in 0..n {
            let d = g
                .player(i)
                .parametrized_objective(&g.opponents_vector(&prof, i)?)?;
            let own = dot(&d, &prof[i]);
            if sets[i].iter().any(|y| better(dot(&d, y), own)) {
                stable = false;
                break;
            }
        }
        if stable {
            found.push(StrategyProfile::pure(prof));
        }
        let mut k = n;
        loop {
            if k == 0 {
                break 'profiles;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sets[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }

    if n == 2 {
        for prof in support_enumeration(g, &sets[0], &sets[1], &check_deadline)? {
            let bary = prof.barycenters();
            let duplicate = found.iter().any(|f| {
                f.barycenters()
                    .iter()
                    .flatten()
                    .zip(bary.iter().flatten())
                    .all(|(a, b)| (a - b).abs() <= 1e-9)
            });
            if !duplicate {
                found.push(prof);
            }
        }
    }

    let elapsed = start.elapsed();
    found
        .into_iter()
        .map(|profile| {
            let status = if profile.strategies.iter().all(MixedStrategy::is_singleton) {
                EquilibriumStatus::Pne
            } else {
                EquilibriumStatus::Mne
            };
            Ok(EquilibriumResult {
                status,
                payoffs: g.payoffs(&profile.barycenters())?,
                profile: Some(profile),
                stats: SolveStats {
                    wall_time: elapsed,
                    ..SolveStats::default()
                },
                message: None,
            })
        })
        .collect()
}

/// Unique solution of the (possibly non-square) system `a x = b`, or
/// `None` when it is inconsistent or underdetermined.
fn solve_unique(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivot_cols = Vec::with_capacity(cols);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() <= SOLVE_EPS {
            return None;
        }
        a.swap(r, p);
        b.swap(r, p);
        for i in 0..rows {
            if i != r {
                let f = a[i][c] / a[r][c];
                if f != 0.0 {
                    for k in c..cols {
                        a[i][k] -= f * a[r][k];
                    }
                    b[i] -= f * b[r];
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if pivot_cols.len() < cols {
        return None;
    }
    if b[r..].iter().any(|v| v.abs() > SOLVE_EPS) {
        return None;
    }
    Some((0..cols).map(|c| b[c] / a[c][c]).collect())
}

/// Mixed strategy over `cols` of the cost matrix `cost[row][col]` that
/// makes the listed `rows` indifferent and no other row cheaper.
/// Returns the weights (aligned with `cols`) and the common cost.
fn indifference(cost: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> Option<(Vec<f64>, f64)> {
    // unknowns (w_cols, v): cost[r]·w − v = 0 for r in rows, Σ w = 1
    let k = cols.len();
    let mut a = Vec::with_capacity(rows.len() + 1);
    let mut b = Vec::with_capacity(rows.len() + 1);
    for &r in rows {
        let mut row: Vec<f64> = cols.iter().map(|&c| cost[r][c]).collect();
        row.push(-1.0);
        a.push(row);
        b.push(0.0);
    }
    let mut sum = vec![1.0; k];
    sum.push(0.0);
    a.push(sum);
    b.push(1.0);
    let sol = solve_unique(a, b)?;
    let (w, v) = (sol[..k].to_vec(), sol[k]);
    if w.iter().any(|&x| x <= SOLVE_EPS) {
        return None;
    }
    let tol = SOLVE_EPS * (1.0 + v.abs());
    for (r, row) in cost.iter().enumerate() {
        let c: f64 = cols.iter().zip(&w).map(|(&j, wj)| row[j] * wj).sum();
        if c < v - tol {
            return None;
        }
        if rows.contains(&r) && (c - v).abs() > tol {
            return None;
        }
    }
    Some((w, v))
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1u64 << n)).map(move |mask| (0..n).filter(|k| mask >> k & 1 == 1).collect())
}

/// A vertex of one player's best-response polytope: a mixture over the
/// player's strategies and the opponent strategies that are best
/// responses to it.
struct Vertex {
    weights: Vec<(usize, f64)>,
    best_responses: Vec<usize>,
}

/// Vertices of `{x ∈ Δ : opponent cost ≥ v}` for the opponent cost matrix
/// `cost[opponent strategy][own strategy]`: each has a unique solution of
/// its tight system.
fn vertices(
    cost: &[Vec<f64>],
    own: usize,
    opp: usize,
    check_deadline: &dyn Fn() -> Result<()>,
) -> Result<Vec<Vertex>> {
    let mut out: Vec<Vertex> = Vec::new();
    for (count, support) in subsets(own).enumerate() {
        if count % 16 == 0 {
            check_deadline()?;
        }
        for tight in subsets(opp) {
            let Some((w, v)) = indifference(cost, &tight, &support) else {
                continue;
            };
            let tol = SOLVE_EPS * (1.0 + v.abs());
            let best_responses: Vec<usize> = (0..opp)
                .filter(|&r| {
                    support
                        .iter()
                        .zip(&w)
                        .map(|(&c, wc)| cost[r][c] * wc)
                        .sum::<f64>()
                        <= v + tol
                })
                .collect();
            if best_responses != tight {
                // reached again from its full tight set
                continue;
            }
            out.push(Vertex {
                weights: support.iter().copied().zip(w).collect(),
                best_responses,
            });
        }
    }
    Ok(out)
}

/// Extreme equilibria of the bimatrix game over the enumerated strategies:
/// pairs of best-response vertices whose supports are mutual best
/// responses.
fn support_enumeration(
    g: &GameModel,
    s0: &[Vec<f64>],
    s1: &[Vec<f64>],
    check_deadline: &dyn Fn() -> Result<()>,
) -> Result<Vec<StrategyProfile>> {
    let pairs = (1u128 << s0.len().min(100)).saturating_mul(1u128 << s1.len().min(100));
    if s0.len() >= 64 || s1.len() >= 64 || pairs > MAX_SUPPORT_PAIRS {
        return Err(Error::BudgetExhausted {
            what: format!(
                "mixed equilibrium enumeration over {} x {} strategies",
                s0.len(),
                s1.len()
            ),
            incumbent: None,
        });
    }
    // a[k][l]: cost to player 0, b[l][k]: cost to player 1
    let mut a = vec![vec![0.0; s1.len()]; s0.len()];
    let mut b = vec![vec![0.0; s0.len()]; s1.len()];
    for (k, x) in s0.iter().enumerate() {
        for (l, y) in s1.iter().enumerate() {
            let pay = g.payoffs(&[x.clone(), y.clone()])?;
            a[k][l] = pay[0];
            b[l][k] = pay[1];
        }
    }
    let xs = vertices(&b, s0.len(), s1.len(), check_deadline)?;
    let ys = vertices(&a, s1.len(), s0.len(), check_deadline)?;
    let mix = |points: &[Vec<f64>], w: &[(usize, f64)]| -> Result<MixedStrategy> {
        MixedStrategy::from_support(w.iter().map(|&(k, wk)| (wk, points[k].clone())).collect())
    };
    let mut out = Vec::new();
    for x in &xs {
        for y in &ys {
            let y_ok = y.weights.iter().all(|(l, _)| x.best_responses.contains(l));
            let x_ok = x.weights.iter().all(|(k, _)| y.best_responses.contains(k));
            if x_ok && y_ok {
                out.push(StrategyProfile {
                    strategies: vec![mix(s0, &x.weights)?, mix(s1, &y.weights)?],
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{canonical_knapsack_game, matching_pennies};
    use crate::numerics::SparseMatrix;

    #[test]
    fn unique_solve() {
        assert_eq!(
            solve_unique(vec![vec![2.0, 0.0], vec![0.0, 4.0]], vec![2.0, 2.0]),
            Some(vec![1.0, 0.5])
        );
        assert_eq!(solve_unique(vec![vec![1.0, 1.0]], vec![1.0]), None);
        assert_eq!(
            solve_unique(vec![vec![1.0], vec![1.0]], vec![1.0, 2.0]),
            None
        );
        assert_eq!(
            solve_unique(vec![vec![1.0], vec![2.0]], vec![1.0, 2.0]),
            Some(vec![1.0])
        );
    }

    #[test]
    fn knapsack_strategies() {
        let g = canonical_knapsack_game();
        let s = pure_strategies(g.player(0)).unwrap();
        assert_eq!(s, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn matching_pennies_has_only_mixed() {
        let all = full_enumeration(&matching_pennies(), &SolverOptions::default()).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].status, EquilibriumStatus::Mne);
        let b = all[0].profile.as_ref().unwrap().barycenters();
        assert!((b[0][0] - 0.5).abs() < 1e-12 && (b[1][0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dominant_strategies() {
        let g = canonical_knapsack_game();
        let players: Vec<PlayerProgram> = g
            .players()
            .iter()
            .map(|p| p.with_cross(SparseMatrix::new(2, 2)).unwrap())
            .collect();
        let g = GameModel::new(players).unwrap();
        let all = full_enumeration(&g, &SolverOptions::default()).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(
            all[0].profile.as_ref().unwrap().barycenters(),
            vec![vec![0.0, 1.0], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn mixed_players_rejected() {
        let p = PlayerProgram::new(
            "c",
            vec![1.0],
            SparseMatrix::new(0, 1),
            SparseMatrix::new(0, 1),
            vec![],
            vec![],
            vec![(0.0, 1.0)],
        )
        .unwrap();
        assert!(matches!(pure_strategies(&p), Err(Error::Usage(_))));
    }

    #[test]
    fn knapsack_game_has_three_equilibria() {
        let all = full_enumeration(&canonical_knapsack_game(), &SolverOptions::default()).unwrap();
        let found: Vec<_> = all
            .iter()
            .map(|e| (e.status, e.profile.as_ref().unwrap().barycenters()))
            .collect();
        assert_eq!(found.len(), 3);
        assert_eq!(
            found[0],
            (EquilibriumStatus::Pne, vec![vec![0.0, 1.0], vec![1.0, 0.0]])
        );
        assert_eq!(
            found[1],
            (EquilibriumStatus::Pne, vec![vec![1.0, 0.0], vec![0.0, 1.0]])
        );
        let expected = [2.0 / 9.0, 7.0 / 9.0, 0.4, 0.6];
        assert_eq!(found[2].0, EquilibriumStatus::Mne);
        for (x, y) in found[2].1.iter().flatten().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_equilibria_are_indifferent() {
        use crate::corpus::{random_knapsack_game, GeneratorSpec};
        for seed in 0..60 {
            let g = random_knapsack_game(&GeneratorSpec::new(seed, 2, 1 + seed as usize % 3, 5));
            let all = full_enumeration(&g, &SolverOptions::default()).unwrap();
            assert!(!all.is_empty());
            for e in all.iter().filter(|e| e.status == EquilibriumStatus::Mne) {
                let profile = e.profile.as_ref().unwrap();
                let bary = profile.barycenters();
                for i in 0..2 {
                    let opp = g.opponents_vector(&bary, i).unwrap();
                    let value = |x: &[f64]| g.player(i).payoff(x, &opp).unwrap();
                    let support = profile.strategies[i].support.as_ref().unwrap();
                    let level = value(&support[0].1);
                    for (_, x) in support {
                        assert!((value(x) - level).abs() <= 1e-9, "seed {seed}");
                    }
                    for x in pure_strategies(g.player(i)).unwrap() {
                        assert!(value(&x) >= level - 1e-9, "seed {seed}");
                    }
                }
            }
        }
    }
}
