//! Games among player programs: profiles, payoffs, the stacked KKT
//! complementarity system of the polyhedral game, and deviation checks.

use std::ops::Range;
use std::time::Duration;

use crate::error::{ensure_dim, usage, Error, Result};
use crate::lcp::Lcp;
use crate::lp::{solve_ip, LpStatus, PlayerProgram, SearchBudget};
use crate::numerics::{dot, DenseMatrix};
use crate::poly::{NonnegForm, Region};

/// Players in a fixed order. Row blocks of every `C` follow the other
/// players in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct GameModel {
    players: Vec<PlayerProgram>,
    offsets: Vec<usize>,
}

impl GameModel {
    pub fn new(players: Vec<PlayerProgram>) -> Result<Self> {
        if players.is_empty() {
            return Err(usage("a game needs at least one player"));
        }
        let mut offsets = Vec::with_capacity(players.len() + 1);
        let mut total = 0;
        for p in &players {
            offsets.push(total);
            total += p.num_vars();
        }
        offsets.push(total);
        for (i, p) in players.iter().enumerate() {
            let expected = total - p.num_vars();
            if p.num_params() != expected {
                return Err(usage(format!(
                    "player {i} ({}): C has {} rows, expected {expected} (sum of the other players' variables)",
                    p.name(),
                    p.num_params()
                )));
            }
        }
        Ok(GameModel { players, offsets })
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[PlayerProgram] {
        &self.players
    }

    pub fn player(&self, i: usize) -> &PlayerProgram {
        &self.players[i]
    }

    /// Range of player `i`'s variables in the concatenated profile vector.
    pub fn variables(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn total_vars(&self) -> usize {
        self.offsets[self.players.len()]
    }

    /// Rows of `C^i` that multiply player `j`'s variables (`j ≠ i`).
    pub fn cross_block(&self, i: usize, j: usize) -> Range<usize> {
        assert_ne!(i, j, "a player has no cross block with itself");
        let start = if j < i {
            self.offsets[j]
        } else {
            self.offsets[j] - self.players[i].num_vars()
        };
        start..start + self.players[j].num_vars()
    }

    /// `x⁻ⁱ`: the other players' strategies concatenated in player order.
    pub fn opponents_vector(&self, profile: &[Vec<f64>], i: usize) -> Result<Vec<f64>> {
        self.check_profile(profile)?;
        if i >= self.num_players() {
            return Err(usage(format!("player index {i} out of range")));
        }
        Ok(profile
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, x)| x.iter().copied())
            .collect())
    }

    fn check_profile(&self, profile: &[Vec<f64>]) -> Result<()> {
        ensure_dim("profile players", self.num_players(), profile.len())?;
        for (p, x) in self.players.iter().zip(profile) {
            ensure_dim(&format!("strategy of {}", p.name()), p.num_vars(), x.len())?;
        }
        Ok(())
    }

    /// Payoff (cost) of every player at the given barycenters.
    pub fn payoffs(&self, profile: &[Vec<f64>]) -> Result<Vec<f64>> {
        (0..self.num_players())
            .map(|i| self.players[i].payoff(&profile[i], &self.opponents_vector(profile, i)?))
            .collect()
    }

    /// Same game with player `i`'s program replaced.
    pub fn with_player(&self, i: usize, p: PlayerProgram) -> Result<GameModel> {
        let mut players = self.players.clone();
        players[i] = p;
        GameModel::new(players)
    }
}

/// A player's strategy: the barycenter and, when known, a finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    pub barycenter: Vec<f64>,
    pub support: Option<Vec<(f64, Vec<f64>)>>,
}

impl MixedStrategy {
    pub fn pure(x: Vec<f64>) -> Self {
        MixedStrategy {
            support: Some(vec![(1.0, x.clone())]),
            barycenter: x,
        }
    }

    /// Builds the strategy from its support; the barycenter is the
    /// weighted sum.
    pub fn from_support(support: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let first = support.first().ok_or_else(|| usage("empty support"))?;
        let mut bary = vec![0.0; first.1.len()];
        for (w, p) in &support {
            ensure_dim("support point", bary.len(), p.len())?;
            if *w < 0.0 {
                return Err(usage("negative support weight"));
            }
            for (b, v) in bary.iter_mut().zip(p) {
                *b += w * v;
            }
        }
        Ok(MixedStrategy {
            barycenter: bary,
            support: Some(support),
        })
    }

    pub fn is_singleton(&self) -> bool {
        self.support.as_ref().is_some_and(|s| s.len() == 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub strategies: Vec<MixedStrategy>,
}

impl StrategyProfile {
    pub fn pure(points: Vec<Vec<f64>>) -> Self {
        StrategyProfile {
            strategies: points.into_iter().map(MixedStrategy::pure).collect(),
        }
    }

    pub fn barycenters(&self) -> Vec<Vec<f64>> {
        self.strategies
            .iter()
            .map(|s| s.barycenter.clone())
            .collect()
    }

    /// Every support is a single point whose integer coordinates are
    /// integral within `eps`.
    pub fn is_pure(&self, g: &GameModel, eps: f64) -> bool {
        self.strategies.iter().zip(g.players()).all(|(s, p)| {
            s.is_singleton()
                && p.integers()
                    .iter()
                    .all(|&j| (s.barycenter[j] - s.barycenter[j].round()).abs() <= eps)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquilibriumStatus {
    Pne,
    Mne,
    NoEquilibriumFound,
    TimeLimit,
    Infeasible,
    NumericalFailure,
}

impl EquilibriumStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EquilibriumStatus::Pne => "PNE",
            EquilibriumStatus::Mne => "MNE",
            EquilibriumStatus::NoEquilibriumFound => "NoEquilibriumFound",
            EquilibriumStatus::TimeLimit => "TimeLimit",
            EquilibriumStatus::Infeasible => "Infeasible",
            EquilibriumStatus::NumericalFailure => "NumericalFailure",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            EquilibriumStatus::Pne,
            EquilibriumStatus::Mne,
            EquilibriumStatus::NoEquilibriumFound,
            EquilibriumStatus::TimeLimit,
            EquilibriumStatus::Infeasible,
            EquilibriumStatus::NumericalFailure,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
    }

    pub fn is_equilibrium(self) -> bool {
        matches!(self, EquilibriumStatus::Pne | EquilibriumStatus::Mne)
    }
}

impl std::fmt::Display for EquilibriumStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub cuts: usize,
    pub branches: usize,
    pub lcp_nodes: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub status: EquilibriumStatus,
    /// Present for PNE/MNE, and for other statuses when a last candidate
    /// profile is available.
    pub profile: Option<StrategyProfile>,
    pub payoffs: Vec<f64>,
    pub stats: SolveStats,
    pub message: Option<String>,
}

impl EquilibriumResult {
    pub fn without_profile(
        status: EquilibriumStatus,
        stats: SolveStats,
        message: impl Into<String>,
    ) -> Self {
        EquilibriumResult {
            status,
            profile: None,
            payoffs: Vec::new(),
            stats,
            message: Some(message.into()),
        }
    }
}

/// The complementarity system of the polyhedral game over given regions,
/// and where each player's variables live in its solution vector.
#[derive(Debug, Clone)]
pub struct NashLcp {
    pub lcp: Lcp,
    pub forms: Vec<NonnegForm>,
    /// Per player, the block of `z` holding the nonnegative variables `u`.
    pub primal: Vec<Range<usize>>,
    /// Per player, the block of `z` holding the row multipliers.
    pub duals: Vec<Range<usize>>,
}

impl NashLcp {
    /// Player strategies `x^i = E u^i + offset` read from a solution.
    pub fn strategies(&self, z: &[f64]) -> Result<Vec<Vec<f64>>> {
        ensure_dim("LCP solution", self.lcp.dim(), z.len())?;
        self.forms
            .iter()
            .zip(&self.primal)
            .map(|(f, r)| f.point(&z[r.clone()]))
            .collect()
    }

    /// Linear equalities on `z` fixing the players' strategies to `profile`.
    pub fn pin(&self, profile: &[Vec<f64>]) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::new();
        for ((f, r), x) in self.forms.iter().zip(&self.primal).zip(profile) {
            for (row, (&xi, o)) in f.embed.rows().zip(x.iter().zip(&f.offset)) {
                let mut a = vec![0.0; self.lcp.dim()];
                a[r.clone()].copy_from_slice(row);
                out.push((a, xi - o));
            }
        }
        out
    }
}

/// Stacks, for every player `i` with region `x = E u + o`, `u ≥ 0`,
/// `G u ≤ h`, the KKT conditions of `min d_i(x⁻ⁱ)·x` over the region:
///
/// ```text
/// 0 ≤ u  ⊥ Eᵀ d_i(x⁻ⁱ) + Gᵀ μ ≥ 0
/// 0 ≤ μ  ⊥ h − G u ≥ 0
/// ```
///
/// with `d_i(x⁻ⁱ) = cⁱ + Cⁱᵀ x⁻ⁱ`. The variables are ordered
/// `(u¹ … uⁿ, μ¹ … μⁿ)`.
pub fn build_nash_lcp(g: &GameModel, regions: &[Region]) -> Result<NashLcp> {
    let n = g.num_players();
    ensure_dim("regions", n, regions.len())?;
    let mut forms = Vec::with_capacity(n);
    for (i, r) in regions.iter().enumerate() {
        ensure_dim(
            &format!("region of player {i}"),
            g.player(i).num_vars(),
            r.dim(),
        )?;
        forms.push(r.nonneg_form()?);
    }
    let mut primal = Vec::with_capacity(n);
    let mut next = 0;
    for f in &forms {
        primal.push(next..next + f.num_vars());
        next += f.num_vars();
    }
    let mut duals = Vec::with_capacity(n);
    for f in &forms {
        duals.push(next..next + f.num_rows());
        next += f.num_rows();
    }
    let dim = next;
    let mut m = DenseMatrix::zeros(dim, dim);
    let mut q = vec![0.0; dim];

    for i in 0..n {
        let p = g.player(i);
        let fi = &forms[i];
        let mi = p.num_vars();
        let cross = p.cross().to_dense();
        // d_i = c_i + Σ_j C_ijᵀ (E_j u_j + o_j)
        let mut d0 = p.cost().to_vec();
        for j in (0..n).filter(|&j| j != i) {
            let block = g.cross_block(i, j);
            let fj = &forms[j];
            // C_ijᵀ has shape m_i × m_j
            let mut cij_t = DenseMatrix::zeros(mi, fj.embed.nrows());
            for (bj, r) in block.clone().enumerate() {
                for k in 0..mi {
                    cij_t[(k, bj)] = cross[(r, k)];
                }
            }
            let shift = cij_t.mul_vec(&fj.offset)?;
            for (d, s) in d0.iter_mut().zip(&shift) {
                *d += s;
            }
            let coupling = fi.embed.transpose().mul_mat(&cij_t.mul_mat(&fj.embed)?)?;
            for (a, row) in primal[i].clone().zip(coupling.rows()) {
                for (b, v) in primal[j].clone().zip(row) {
                    m[(a, b)] = *v;
                }
            }
        }
        let qu = fi.embed.tr_mul_vec(&d0)?;
        for (a, v) in primal[i].clone().zip(qu) {
            q[a] = v;
        }
        for (r, row) in fi.rows.rows().enumerate() {
            let mu = duals[i].start + r;
            for (k, v) in row.iter().enumerate() {
                let u = primal[i].start + k;
                m[(u, mu)] = *v;
                m[(mu, u)] = -*v;
            }
            q[mu] = fi.rhs[r];
        }
    }
    Ok(NashLcp {
        lcp: Lcp::new(m, q)?,
        forms,
        primal,
        duals,
    })
}

/// A profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub player: usize,
    pub response: Vec<f64>,
    /// Current payoff minus best-response payoff.
    pub improvement: f64,
}

/// Solves every player's best-response IP against the barycenters and
/// reports players that improve by more than `eps`.
pub fn deviation_check(
    g: &GameModel,
    profile: &[Vec<f64>],
    eps: f64,
    budget: SearchBudget,
) -> Result<Vec<Deviation>> {
    g.check_profile(profile)?;
    let mut out = Vec::new();
    for i in 0..g.num_players() {
        let opp = g.opponents_vector(profile, i)?;
        let p = g.player(i);
        let best = solve_ip(p, &opp, budget)?;
        match best.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                return Err(Error::Infeasible(format!(
                    "player {} has no feasible strategy",
                    p.name()
                )))
            }
            LpStatus::Unbounded => {
                return Err(usage(format!(
                    "best response of player {} is unbounded",
                    p.name()
                )))
            }
        }
        let current = p.payoff(&profile[i], &opp)?;
        let improvement = current - best.objective;
        if improvement > eps {
            out.push(Deviation {
                player: i,
                response: best.x,
                improvement,
            });
        }
    }
    Ok(out)
}

/// Payoff of each player at the profile's barycenters.
pub fn profile_payoffs(g: &GameModel, profile: &StrategyProfile) -> Result<Vec<f64>> {
    g.payoffs(&profile.barycenters())
}

/// Expected payoff of player `i` under its support, opponents at their
/// barycenters.
pub fn expected_payoff(g: &GameModel, profile: &StrategyProfile, i: usize) -> Result<Option<f64>> {
    let bary = profile.barycenters();
    let opp = g.opponents_vector(&bary, i)?;
    let Some(support) = &profile.strategies[i].support else {
        return Ok(None);
    };
    let d = g.player(i).parametrized_objective(&opp)?;
    Ok(Some(support.iter().map(|(w, x)| w * dot(&d, x)).sum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{canonical_knapsack_game, random_knapsack_game, GeneratorSpec};
    use crate::lcp::{solve_lcp, solve_lcp_constrained, LcpOptions, LcpOutcome};
    use crate::numerics::SparseMatrix;
    use crate::poly::{convex_hull, Polyhedron};

    fn binary_points(p: &PlayerProgram) -> Vec<Vec<f64>> {
        let m = p.num_vars();
        (0u32..1 << m)
            .map(|mask| (0..m).map(|j| f64::from(mask >> j & 1)).collect::<Vec<_>>())
            .filter(|x| p.is_feasible(x, 1e-9))
            .collect()
    }

    /// Hull of the feasible binary points, one degenerate box per point.
    fn integer_hull(p: &PlayerProgram) -> Region {
        let pieces: Vec<Polyhedron> = binary_points(p)
            .into_iter()
            .map(|x| Polyhedron::bounds_only(x.clone(), x).unwrap())
            .collect();
        convex_hull(&pieces).unwrap().into()
    }

    fn solve_first(nl: &NashLcp) -> Vec<Vec<f64>> {
        match solve_lcp(&nl.lcp, &LcpOptions::default()).unwrap() {
            LcpOutcome::Solved(s) => nl.strategies(&s.z).unwrap(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn opponents_vector_order() {
        let g = canonical_knapsack_game();
        let prof = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(g.opponents_vector(&prof, 0).unwrap(), vec![3.0, 4.0]);
        assert_eq!(g.opponents_vector(&prof, 1).unwrap(), vec![1.0, 2.0]);

        let single = |name: &str| {
            PlayerProgram::new(
                name,
                vec![1.0],
                SparseMatrix::new(2, 1),
                SparseMatrix::new(0, 1),
                vec![],
                vec![],
                vec![(0.0, 1.0)],
            )
            .unwrap()
        };
        let g3 = GameModel::new(vec![single("a"), single("b"), single("c")]).unwrap();
        let prof = vec![vec![1.0], vec![2.0], vec![3.0]];
        assert_eq!(g3.opponents_vector(&prof, 1).unwrap(), vec![1.0, 3.0]);
        assert_eq!(g3.cross_block(1, 0), 0..1);
        assert_eq!(g3.cross_block(1, 2), 1..2);
        assert_eq!(g3.cross_block(0, 2), 1..2);
    }

    #[test]
    fn mismatched_cross_rows_rejected() {
        let g = canonical_knapsack_game();
        let bad = g.player(0).with_cross(SparseMatrix::new(3, 2)).unwrap();
        assert!(g.with_player(0, bad).is_err());
    }

    #[test]
    fn knapsack_payoffs() {
        let g = canonical_knapsack_game();
        assert_eq!(
            g.payoffs(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            vec![-2.0, -3.0]
        );
        assert_eq!(
            g.payoffs(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            g.payoffs(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            vec![-1.0, -5.0]
        );
    }

    #[test]
    fn knapsack_deviations() {
        let g = canonical_knapsack_game();
        let none = SearchBudget::unlimited();
        assert!(
            deviation_check(&g, &[vec![0.0, 1.0], vec![1.0, 0.0]], 0.0, none)
                .unwrap()
                .is_empty()
        );
        assert!(
            deviation_check(&g, &[vec![1.0, 0.0], vec![0.0, 1.0]], 0.0, none)
                .unwrap()
                .is_empty()
        );

        let d = deviation_check(&g, &[vec![1.0, 0.0], vec![1.0, 0.0]], 0.0, none).unwrap();
        assert_eq!(d[0].player, 0);
        assert_eq!(d[0].response, vec![0.0, 1.0]);
        assert!((d[0].improvement - 3.0).abs() < 1e-12);

        let mixed = [vec![2.0 / 9.0, 7.0 / 9.0], vec![0.4, 0.6]];
        assert!(deviation_check(&g, &mixed, 1e-6, none).unwrap().is_empty());
    }

    #[test]
    fn infeasible_best_response_is_an_error() {
        let p = crate::corpus::infeasible_player();
        let g = GameModel::new(vec![p]).unwrap();
        assert!(matches!(
            deviation_check(&g, &[vec![0.0]], 0.0, SearchBudget::unlimited()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn decoupled_lcp_picks_lower_bounds() {
        let p = |name: &str| {
            PlayerProgram::new(
                name,
                vec![1.0],
                SparseMatrix::new(1, 1),
                SparseMatrix::new(0, 1),
                vec![],
                vec![],
                vec![(0.0, 1.0)],
            )
            .unwrap()
        };
        let g = GameModel::new(vec![p("a"), p("b")]).unwrap();
        let regions: Vec<Region> = g.players().iter().map(|p| p.relaxation().into()).collect();
        let nl = build_nash_lcp(&g, &regions).unwrap();
        assert_eq!(solve_first(&nl), vec![vec![0.0], vec![0.0]]);
    }

    #[test]
    fn single_player_lcp_is_ip_optimum() {
        let blue = canonical_knapsack_game()
            .player(0)
            .with_cross(SparseMatrix::new(0, 2))
            .unwrap();
        let g = GameModel::new(vec![blue.clone()]).unwrap();
        let nl = build_nash_lcp(&g, &[integer_hull(&blue)]).unwrap();
        let x = solve_first(&nl);
        assert!(
            (x[0][0]).abs() < 1e-9 && (x[0][1] - 1.0).abs() < 1e-9,
            "{x:?}"
        );
    }

    #[test]
    fn knapsack_hull_lcp_contains_mixed_profile() {
        let g = canonical_knapsack_game();
        let regions: Vec<Region> = g.players().iter().map(integer_hull).collect();
        let nl = build_nash_lcp(&g, &regions).unwrap();
        let mixed = vec![vec![2.0 / 9.0, 7.0 / 9.0], vec![0.4, 0.6]];
        let side = nl.pin(&mixed);
        match solve_lcp_constrained(&nl.lcp, &side, &LcpOptions::default()).unwrap() {
            LcpOutcome::Solved(s) => {
                let x = nl.strategies(&s.z).unwrap();
                for (a, b) in x.iter().flatten().zip(mixed.iter().flatten()) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
            other => panic!("{other:?}"),
        }
        // a non-equilibrium point of the hulls is not in the solution set
        let side = nl.pin(&[vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert!(matches!(
            solve_lcp_constrained(&nl.lcp, &side, &LcpOptions::default()).unwrap(),
            LcpOutcome::NoSolution {
                certified: true,
                ..
            }
        ));
    }

    /// Every LCP solution is a profile of mutual LP best responses.
    #[test]
    fn lcp_solutions_are_lp_optimal() {
        for seed in 0..40 {
            let n = 2 + (seed as usize % 2);
            let g = random_knapsack_game(&GeneratorSpec::new(seed, n, 3, 5));
            let regions: Vec<Region> = g.players().iter().map(|p| p.relaxation().into()).collect();
            let nl = build_nash_lcp(&g, &regions).unwrap();
            let x = solve_first(&nl);
            for i in 0..n {
                let opp = g.opponents_vector(&x, i).unwrap();
                let d = g.player(i).parametrized_objective(&opp).unwrap();
                let (best, _) = regions[i].minimize(&d).unwrap().unwrap();
                assert!(regions[i].contains(&x[i], 1e-7).unwrap());
                assert!(
                    (dot(&d, &x[i]) - best).abs() < 1e-6,
                    "seed {seed} player {i}"
                );
            }
        }
    }

    /// Exhaustive deviation enumeration over the binary points.
    fn brute_force_is_pne(g: &GameModel, prof: &[Vec<f64>], eps: f64) -> bool {
        (0..g.num_players()).all(|i| {
            let opp = g.opponents_vector(prof, i).unwrap();
            let p = g.player(i);
            let own = p.payoff(&prof[i], &opp).unwrap();
            binary_points(p)
                .iter()
                .all(|y| p.payoff(y, &opp).unwrap() >= own - eps)
        })
    }

    fn pure_profiles(g: &GameModel) -> Vec<Vec<Vec<f64>>> {
        let sets: Vec<Vec<Vec<f64>>> = g.players().iter().map(binary_points).collect();
        let mut out = vec![vec![]];
        for s in &sets {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Vec<f64>>| {
                    s.iter().map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x.clone());
                        v
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn deviation_check_matches_brute_force() {
        for seed in 0..60 {
            let m = 1 + (seed as usize % 3);
            let g = random_knapsack_game(&GeneratorSpec::new(seed, 2, m, 5));
            for prof in pure_profiles(&g) {
                let dev = deviation_check(&g, &prof, 0.0, SearchBudget::unlimited()).unwrap();
                assert_eq!(
                    dev.is_empty(),
                    brute_force_is_pne(&g, &prof, 0.0),
                    "seed {seed} {prof:?}"
                );
            }
        }
    }

    #[test]
    fn certificate_is_scale_invariant() {
        for seed in 0..30 {
            let g = random_knapsack_game(&GeneratorSpec::new(seed, 2, 2, 5));
            let passing = |g: &GameModel| -> Vec<bool> {
                pure_profiles(g)
                    .iter()
                    .map(|p| {
                        deviation_check(g, p, 0.0, SearchBudget::unlimited())
                            .unwrap()
                            .is_empty()
                    })
                    .collect()
            };
            let base = passing(&g);
            for lambda in [2.0, 5.0] {
                let scaled = GameModel::new(
                    g.players()
                        .iter()
                        .map(|p| p.scaled_objective(lambda))
                        .collect(),
                )
                .unwrap();
                assert_eq!(passing(&scaled), base);
            }
        }
    }

    #[test]
    fn barycenter_payoff_identity() {
        let g = canonical_knapsack_game();
        let profile = StrategyProfile {
            strategies: vec![
                MixedStrategy::from_support(vec![
                    (2.0 / 9.0, vec![1.0, 0.0]),
                    (7.0 / 9.0, vec![0.0, 1.0]),
                ])
                .unwrap(),
                MixedStrategy::from_support(vec![(0.4, vec![1.0, 0.0]), (0.6, vec![0.0, 1.0])])
                    .unwrap(),
            ],
        };
        let pay = profile_payoffs(&g, &profile).unwrap();
        for i in 0..2 {
            let e = expected_payoff(&g, &profile, i).unwrap().unwrap();
            assert!((e - pay[i]).abs() < 1e-9);
        }
        assert!(!profile.is_pure(&g, 1e-9));
        assert!(StrategyProfile::pure(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_pure(&g, 1e-9));
    }

    #[test]
    fn status_strings_round_trip() {
        for s in [
            "PNE",
            "MNE",
            "NoEquilibriumFound",
            "TimeLimit",
            "Infeasible",
            "NumericalFailure",
        ] {
            assert_eq!(EquilibriumStatus::parse(s).unwrap().as_str(), s);
        }
        assert!(EquilibriumStatus::parse("pne").is_none());
    }
}
