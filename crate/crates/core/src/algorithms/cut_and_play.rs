//! Cut-And-Play: solve the game over polyhedral outer approximations of
//! the players' convexified feasible sets, then refine the approximations
//! with cuts or branching until the relaxed equilibrium is a true one.

use std::time::Instant;

use super::cuts::{cover_cuts, gomory_cuts, Cut, CutKind};
use super::purify::purify;
use super::SolverOptions;
use crate::error::{Error, Result};
use crate::game::{
    build_nash_lcp, deviation_check, EquilibriumResult, EquilibriumStatus, GameModel,
    MixedStrategy, SolveStats, StrategyProfile,
};
use crate::lcp::{solve_lcp, LcpOptions, LcpOutcome};
use crate::lp::{most_fractional, solve_ip, LpStatus, PlayerProgram, SearchBudget};
use crate::numerics::Tolerances;
use crate::poly::{convex_hull, Polyhedron, Region};

/// One player's outer approximation: a list of pieces, each the
/// relaxation intersected with the cuts and a box from branching. The
/// region is the convex hull of the pieces.
#[derive(Debug, Clone)]
pub struct PlayerApproximation {
    integers: Vec<usize>,
    cuts: Vec<Cut>,
    pieces: Vec<Polyhedron>,
    gomory_rounds: usize,
}

impl PlayerApproximation {
    /// Starts from the linear relaxation. Errors with `Infeasible` when
    /// the relaxation has no point with integral integer coordinates
    /// according to bound propagation, or is empty.
    pub fn new(p: &PlayerProgram) -> Result<Self> {
        let base = p.relaxation();
        if !base.is_bounded()? {
            return Err(Error::Usage(format!(
                "player {} has an unbounded feasible region",
                p.name()
            )));
        }
        let piece = base
            .tightened(p.integers())
            .filter(|t| !t.is_empty().unwrap_or(true))
            .ok_or_else(|| {
                Error::Infeasible(format!("player {} has an empty relaxation", p.name()))
            })?;
        Ok(PlayerApproximation {
            integers: p.integers().to_vec(),
            cuts: Vec::new(),
            pieces: vec![piece],
            gomory_rounds: 0,
        })
    }

    pub fn pieces(&self) -> &[Polyhedron] {
        &self.pieces
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn region(&self) -> Result<Region> {
        if self.pieces.len() == 1 {
            Ok(Region::Polyhedron(self.pieces[0].clone()))
        } else {
            Ok(Region::Hull(convex_hull(&self.pieces)?))
        }
    }

    /// Tightens and keeps the nonempty pieces; `Infeasible` when none is
    /// left.
    fn set_pieces(&mut self, pieces: Vec<Polyhedron>) -> Result<()> {
        let mut kept = Vec::with_capacity(pieces.len());
        for p in pieces {
            if let Some(t) = p.tightened(&self.integers) {
                if !t.is_empty()? {
                    kept.push(t);
                }
            }
        }
        if kept.is_empty() {
            return Err(Error::Infeasible(
                "every piece of the approximation is empty".into(),
            ));
        }
        self.pieces = kept;
        Ok(())
    }
}

/// Outer approximations of all players.
#[derive(Debug, Clone)]
pub struct OuterApproximation {
    pub players: Vec<PlayerApproximation>,
}

impl OuterApproximation {
    pub fn new(g: &GameModel) -> Result<Self> {
        Ok(OuterApproximation {
            players: g
                .players()
                .iter()
                .map(PlayerApproximation::new)
                .collect::<Result<_>>()?,
        })
    }

    pub fn regions(&self) -> Result<Vec<Region>> {
        self.players
            .iter()
            .map(PlayerApproximation::region)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    /// The point is in the convexified feasible set; the support lists
    /// feasible points and weights whose combination is the point.
    Member(Vec<(f64, Vec<f64>)>),
    Cuts(Vec<Cut>),
    /// Split `piece` on `var` around its fractional `value`.
    Branch {
        piece: usize,
        var: usize,
        value: f64,
    },
}

fn integral(x: &[f64], integers: &[usize], eps: f64) -> bool {
    integers.iter().all(|&j| (x[j] - x[j].round()).abs() <= eps)
}

fn snapped(x: &[f64], integers: &[usize]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &j in integers {
        y[j] = y[j].round();
    }
    y
}

/// Decides whether `sigma` lies in the convex hull of the player's
/// feasible points, or returns a refinement that excludes it.
/// `objective` is the player's cost at the current profile; Gomory cuts
/// are read from the optimal tableau for it.
pub fn separation_oracle(
    p: &PlayerProgram,
    sigma: &[f64],
    state: &PlayerApproximation,
    objective: &[f64],
    tol: &Tolerances,
    max_gomory_rounds: usize,
) -> Result<Separation> {
    let eps = tol.feasibility_eps;
    if integral(sigma, p.integers(), eps) && p.is_feasible(sigma, eps) {
        return Ok(Separation::Member(vec![(
            1.0,
            snapped(sigma, p.integers()),
        )]));
    }
    if state.pieces.len() > 1 {
        let hull = convex_hull(&state.pieces)?;
        let parts = hull.decompose_indexed(sigma, eps, tol.zero_eps)?;
        if parts
            .iter()
            .all(|(_, _, x)| integral(x, p.integers(), eps) && p.is_feasible(x, eps))
        {
            return Ok(Separation::Member(
                parts
                    .into_iter()
                    .map(|(_, w, x)| (w, snapped(&x, p.integers())))
                    .collect(),
            ));
        }
        let covers = cover_cuts(p, sigma, eps);
        if !covers.is_empty() {
            return Ok(Separation::Cuts(covers));
        }
        for (k, _, x) in &parts {
            if let Some(var) = most_fractional(x, p.integers()) {
                debug_assert_eq!(hull.pieces().len(), state.pieces.len());
                return Ok(Separation::Branch {
                    piece: *k,
                    var,
                    value: x[var],
                });
            }
        }
        return Err(Error::NumericalFailure(
            "point decomposes into integral pieces that fail the feasibility check".into(),
        ));
    }
    let covers = cover_cuts(p, sigma, eps);
    if !covers.is_empty() {
        return Ok(Separation::Cuts(covers));
    }
    if state.gomory_rounds < max_gomory_rounds {
        let gmi = gomory_cuts(&state.pieces[0], p.integers(), objective, sigma, eps)?;
        if !gmi.is_empty() {
            return Ok(Separation::Cuts(gmi));
        }
    }
    match most_fractional(sigma, p.integers()) {
        Some(var) => Ok(Separation::Branch {
            piece: 0,
            var,
            value: sigma[var],
        }),
        None => Err(Error::NumericalFailure(
            "integral point outside the feasible set of its own relaxation".into(),
        )),
    }
}

/// Applies a refinement. Cuts go to every piece; a branch replaces the
/// piece by its two children. Fails with `Infeasible` when no piece is
/// left.
pub fn refine_region(state: &mut PlayerApproximation, action: &Separation) -> Result<()> {
    match action {
        Separation::Member(_) => Ok(()),
        Separation::Cuts(cuts) => {
            let mut pieces = state.pieces.clone();
            for c in cuts {
                for p in pieces.iter_mut() {
                    *p = p.with_row(&c.row, c.rhs)?;
                }
            }
            if cuts.iter().any(|c| c.kind == CutKind::Gomory) {
                state.gomory_rounds += 1;
            }
            state.cuts.extend(cuts.iter().cloned());
            state.set_pieces(pieces)
        }
        &Separation::Branch { piece, var, value } => {
            let parent = &state.pieces[piece];
            let mut down_hi = parent.upper().to_vec();
            down_hi[var] = down_hi[var].min(value.floor());
            let mut up_lo = parent.lower().to_vec();
            up_lo[var] = up_lo[var].max(value.ceil());
            let down = parent.with_bounds(parent.lower().to_vec(), down_hi)?;
            let up = parent.with_bounds(up_lo, parent.upper().to_vec())?;
            let mut pieces = state.pieces.clone();
            pieces.splice(piece..=piece, [down, up]);
            state.set_pieces(pieces)
        }
    }
}

/// Snapshot passed to the observer after a player's region is refined.
pub struct Observation<'a> {
    pub iteration: usize,
    pub player: usize,
    pub approximation: &'a PlayerApproximation,
    pub region: &'a Region,
}

pub fn cut_and_play(g: &GameModel, opts: &SolverOptions) -> Result<EquilibriumResult> {
    cut_and_play_observed(g, opts, &mut |_| {})
}

struct Run<'a> {
    start: Instant,
    deadline: Option<Instant>,
    stats: SolveStats,
    g: &'a GameModel,
}

impl Run<'_> {
    fn finish(
        &mut self,
        status: EquilibriumStatus,
        profile: Option<StrategyProfile>,
        message: Option<String>,
    ) -> EquilibriumResult {
        self.stats.wall_time = self.start.elapsed();
        let payoffs = profile
            .as_ref()
            .and_then(|p| self.g.payoffs(&p.barycenters()).ok())
            .unwrap_or_default();
        EquilibriumResult {
            status,
            profile,
            payoffs,
            stats: self.stats,
            message,
        }
    }

    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Maps a solver error to a terminal status, or passes it on.
    fn fail(&mut self, e: Error, last: Option<StrategyProfile>) -> Result<EquilibriumResult> {
        let status = match &e {
            Error::BudgetExhausted { .. } if self.timed_out() => EquilibriumStatus::TimeLimit,
            Error::BudgetExhausted { .. } | Error::NumericalFailure(_) => {
                EquilibriumStatus::NumericalFailure
            }
            Error::Infeasible(_) => EquilibriumStatus::Infeasible,
            _ => return Err(e),
        };
        Ok(self.finish(status, last, Some(e.to_string())))
    }
}

/// [`cut_and_play`] calling `observer` after every refinement.
pub fn cut_and_play_observed(
    g: &GameModel,
    opts: &SolverOptions,
    observer: &mut dyn FnMut(&Observation<'_>),
) -> Result<EquilibriumResult> {
    opts.validate()?;
    let start = Instant::now();
    let mut run = Run {
        start,
        deadline: opts.time_limit.map(|t| start + t),
        stats: SolveStats::default(),
        g,
    };
    let tol = opts.tolerances;
    let budget = SearchBudget::with_deadline(run.deadline);

    let mut state = match OuterApproximation::new(g) {
        Ok(s) => s,
        Err(e) => return run.fail(e, None),
    };
    // an empty integer feasible set makes the game infeasible
    for p in g.players() {
        match solve_ip(p, &vec![0.0; p.num_params()], budget) {
            Ok(r) if r.status == LpStatus::Infeasible => {
                return Ok(run.finish(
                    EquilibriumStatus::Infeasible,
                    None,
                    Some(format!("player {} has no feasible strategy", p.name())),
                ))
            }
            Ok(_) => {}
            Err(e) => return run.fail(e, None),
        }
    }
    let mut regions = match state.regions() {
        Ok(r) => r,
        Err(e) => return run.fail(e, None),
    };
    let lcp_opts = LcpOptions {
        method: opts.lcp_method,
        max_nodes: None,
        deadline: run.deadline,
        workers: opts.workers,
        complementarity_eps: tol.complementarity_eps,
    };

    let mut last: Option<StrategyProfile> = None;
    for iteration in 1..=opts.max_iterations {
        if run.timed_out() {
            return Ok(run.finish(
                EquilibriumStatus::TimeLimit,
                last,
                Some("time limit reached".into()),
            ));
        }
        run.stats.iterations = iteration;
        let nl = match build_nash_lcp(g, &regions) {
            Ok(nl) => nl,
            Err(e) => return run.fail(e, last),
        };
        let sol = match solve_lcp(&nl.lcp, &lcp_opts) {
            Ok(LcpOutcome::Solved(s)) => s,
            Ok(LcpOutcome::NoSolution { certified, work }) => {
                run.stats.lcp_nodes += work;
                let (status, msg) = if certified {
                    (
                        EquilibriumStatus::NoEquilibriumFound,
                        "the relaxed game has no equilibrium",
                    )
                } else {
                    (
                        EquilibriumStatus::NumericalFailure,
                        "the LCP method stopped without an answer",
                    )
                };
                return Ok(run.finish(status, last, Some(msg.into())));
            }
            Err(e) => return run.fail(e, last),
        };
        run.stats.lcp_nodes += sol.work;
        let sigma = nl.strategies(&sol.z)?;
        last = Some(StrategyProfile {
            strategies: sigma
                .iter()
                .map(|x| MixedStrategy {
                    barycenter: x.clone(),
                    support: None,
                })
                .collect(),
        });

        let mut actions = Vec::with_capacity(g.num_players());
        for (i, p) in g.players().iter().enumerate() {
            let opp = g.opponents_vector(&sigma, i)?;
            let objective = p.parametrized_objective(&opp)?;
            match separation_oracle(
                p,
                &sigma[i],
                &state.players[i],
                &objective,
                &tol,
                opts.max_gomory_rounds,
            ) {
                Ok(a) => actions.push(a),
                Err(e) => return run.fail(e, last),
            }
        }

        if actions.iter().all(|a| matches!(a, Separation::Member(_))) {
            let mut strategies = Vec::with_capacity(actions.len());
            for a in actions {
                let Separation::Member(support) = a else {
                    unreachable!()
                };
                strategies.push(MixedStrategy::from_support(support)?);
            }
            let profile = StrategyProfile { strategies };
            let dev = match deviation_check(g, &profile.barycenters(), tol.deviation_eps, budget) {
                Ok(d) => d,
                Err(e) => return run.fail(e, Some(profile)),
            };
            if !dev.is_empty() {
                let msg = format!(
                    "certified profile fails the deviation check (player {} improves by {:e})",
                    dev[0].player, dev[0].improvement
                );
                return Ok(run.finish(
                    EquilibriumStatus::NumericalFailure,
                    Some(profile),
                    Some(msg),
                ));
            }
            let profile = if profile.is_pure(g, tol.feasibility_eps) {
                profile
            } else {
                match purify(g, &profile, tol.zero_eps, tol.zero_eps, budget) {
                    Ok(Some(p))
                        if deviation_check(g, &p.barycenters(), tol.deviation_eps, budget)
                            .is_ok_and(|d| d.is_empty()) =>
                    {
                        p
                    }
                    _ => profile,
                }
            };
            let status = if profile.is_pure(g, tol.feasibility_eps) {
                EquilibriumStatus::Pne
            } else {
                EquilibriumStatus::Mne
            };
            return Ok(run.finish(status, Some(profile), None));
        }

        for (i, action) in actions.iter().enumerate() {
            match action {
                Separation::Member(_) => continue,
                Separation::Cuts(c) => run.stats.cuts += c.len(),
                Separation::Branch { .. } => run.stats.branches += 1,
            }
            if let Err(e) = refine_region(&mut state.players[i], action) {
                return run.fail(e, last);
            }
            regions[i] = match state.players[i].region() {
                Ok(r) => r,
                Err(e) => return run.fail(e, last),
            };
            observer(&Observation {
                iteration,
                player: i,
                approximation: &state.players[i],
                region: &regions[i],
            });
        }
    }
    let limit = opts.max_iterations;
    Ok(run.finish(
        EquilibriumStatus::NumericalFailure,
        last,
        Some(format!(
            "no equilibrium certified within {limit} iterations"
        )),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{
        canonical_knapsack_game, infeasible_player, random_knapsack_game, GeneratorSpec,
    };
    use crate::numerics::{seeded_rng, SparseMatrix};
    use rand::Rng;

    fn blue() -> PlayerProgram {
        canonical_knapsack_game()
            .player(0)
            .with_cross(SparseMatrix::new(0, 2))
            .unwrap()
    }

    fn oracle(state: &PlayerApproximation, sigma: &[f64]) -> Separation {
        let p = blue();
        separation_oracle(&p, sigma, state, p.cost(), &Tolerances::default(), 5).unwrap()
    }

    fn branch_on_x2(state: &mut PlayerApproximation) {
        let action = Separation::Branch {
            piece: 0,
            var: 1,
            value: 0.5,
        };
        refine_region(state, &action).unwrap();
    }

    fn distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn knapsack_game_reaches_a_listed_equilibrium() {
        let g = canonical_knapsack_game();
        let opts = SolverOptions {
            time_limit: Some(std::time::Duration::from_secs(5)),
            ..SolverOptions::default()
        };
        let r = cut_and_play(&g, &opts).unwrap();
        assert!(r.status.is_equilibrium(), "{:?}", r);
        let b = r.profile.as_ref().unwrap().barycenters();
        let listed = [
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![2.0 / 9.0, 7.0 / 9.0], vec![0.4, 0.6]],
        ];
        assert!(listed.iter().any(|e| distance(e, &b) <= 1e-5), "{b:?}");
        assert!(deviation_check(&g, &b, 3e-4, SearchBudget::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn single_player_returns_ip_optimum() {
        let g = GameModel::new(vec![blue()]).unwrap();
        let r = cut_and_play(&g, &SolverOptions::default()).unwrap();
        assert_eq!(r.status, EquilibriumStatus::Pne);
        assert_eq!(r.profile.unwrap().barycenters(), vec![vec![0.0, 1.0]]);
        assert!((r.payoffs[0] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_player_is_reported() {
        let g = GameModel::new(vec![infeasible_player()]).unwrap();
        let r = cut_and_play(&g, &SolverOptions::default()).unwrap();
        assert_eq!(r.status, EquilibriumStatus::Infeasible);
        assert!(r.profile.is_none());
    }

    #[test]
    fn integral_point_is_member() {
        let state = PlayerApproximation::new(&blue()).unwrap();
        assert_eq!(
            oracle(&state, &[0.0, 1.0]),
            Separation::Member(vec![(1.0, vec![0.0, 1.0])])
        );
    }

    #[test]
    fn fractional_point_gets_cover_cut() {
        let state = PlayerApproximation::new(&blue()).unwrap();
        match oracle(&state, &[1.0, 0.5]) {
            Separation::Cuts(cuts) => {
                assert!(cuts.iter().any(|c| c.violation(&[1.0, 0.5]) >= 1e-7));
            }
            other => panic!("expected cuts, got {other:?}"),
        }
    }

    #[test]
    fn hull_member_after_branching() {
        let mut state = PlayerApproximation::new(&blue()).unwrap();
        branch_on_x2(&mut state);
        match oracle(&state, &[2.0 / 9.0, 7.0 / 9.0]) {
            Separation::Member(support) => {
                let s = MixedStrategy::from_support(support).unwrap();
                assert!(distance(&[s.barycenter], &[vec![2.0 / 9.0, 7.0 / 9.0]]) < 1e-9);
            }
            other => panic!("expected membership, got {other:?}"),
        }
    }

    #[test]
    fn branching_gives_the_triangle() {
        let mut state = PlayerApproximation::new(&blue()).unwrap();
        branch_on_x2(&mut state);
        let region = state.region().unwrap();
        for v in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5]] {
            assert!(region.contains(&v, 1e-9).unwrap(), "{v:?}");
        }
        for v in [[1.0, 0.5], [0.34, 0.67], [1.0, 0.01]] {
            assert!(!region.contains(&v, 1e-9).unwrap(), "{v:?}");
        }
    }

    #[test]
    fn cut_excludes_point() {
        let mut state = PlayerApproximation::new(&blue()).unwrap();
        let cut = Cut {
            row: vec![1.0, 1.0],
            rhs: 1.0,
            kind: CutKind::Cover,
        };
        refine_region(&mut state, &Separation::Cuts(vec![cut])).unwrap();
        let region = state.region().unwrap();
        assert!(!region.contains(&[1.0, 0.5], 1e-9).unwrap());
        assert!(region.contains(&[0.0, 1.0], 1e-9).unwrap());
        assert_eq!(state.cuts().len(), 1);
    }

    #[test]
    fn branch_into_nothing_is_infeasible() {
        // x ≤ 0.5 with x binary: the up child is empty and the down child is {0}
        let p = PlayerProgram::new(
            "half",
            vec![-1.0],
            SparseMatrix::new(0, 1),
            SparseMatrix::from_triplets(1, 1, [(0, 0, 2.0)]).unwrap(),
            vec![1.0],
            vec![0],
            vec![(0.0, 1.0)],
        )
        .unwrap();
        let mut state = PlayerApproximation::new(&p).unwrap();
        assert_eq!(state.pieces()[0].upper(), &[0.0]);
        let action = Separation::Branch {
            piece: 0,
            var: 0,
            value: 0.5,
        };
        refine_region(&mut state, &action).unwrap();
        assert_eq!(state.pieces().len(), 1);
        let cut = Cut {
            row: vec![-1.0],
            rhs: -0.5,
            kind: CutKind::Cover,
        };
        assert!(matches!(
            refine_region(&mut state, &Separation::Cuts(vec![cut])),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn refinements_keep_integer_points_and_shrink() {
        let mut rng = seeded_rng(11);
        for seed in 0..30 {
            let g = random_knapsack_game(&GeneratorSpec::new(seed, 2, 3, 5));
            let points: Vec<Vec<Vec<f64>>> = g
                .players()
                .iter()
                .map(|p| super::super::pure_strategies(p).unwrap())
                .collect();
            let mut previous: Vec<Region> = OuterApproximation::new(&g).unwrap().regions().unwrap();
            cut_and_play_observed(&g, &SolverOptions::default(), &mut |obs| {
                for x in &points[obs.player] {
                    assert!(obs.region.contains(x, 1e-7).unwrap(), "lost {x:?}");
                    assert!(obs
                        .approximation
                        .cuts()
                        .iter()
                        .all(|c| c.violation(x) <= 1e-7));
                }
                for _ in 0..5 {
                    let dir: Vec<f64> = (0..obs.region.dim())
                        .map(|_| rng.random_range(-1.0..1.0))
                        .collect();
                    let (_, v) = obs.region.minimize(&dir).unwrap().unwrap();
                    assert!(previous[obs.player].contains(&v, 1e-7).unwrap());
                }
                previous[obs.player] = obs.region.clone();
            })
            .unwrap();
        }
    }

    #[test]
    fn runs_are_deterministic() {
        for seed in 0..10 {
            let g = random_knapsack_game(&GeneratorSpec::new(seed, 3, 2, 5));
            let mut a = cut_and_play(&g, &SolverOptions::default()).unwrap();
            let mut b = cut_and_play(&g, &SolverOptions::default()).unwrap();
            a.stats.wall_time = Default::default();
            b.stats.wall_time = Default::default();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn pure_results_pass_exact_check() {
        for seed in 0..40 {
            let g = random_knapsack_game(&GeneratorSpec::new(seed, 2, 2, 5));
            let r = cut_and_play(&g, &SolverOptions::default()).unwrap();
            if r.status == EquilibriumStatus::Pne {
                let b = r.profile.unwrap().barycenters();
                assert!(deviation_check(&g, &b, 0.0, SearchBudget::default())
                    .unwrap()
                    .is_empty());
            }
        }
    }
}
