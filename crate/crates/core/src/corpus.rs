//! Instance generators: the two-player knapsack example and seeded random
//! knapsack games.

use rand::Rng;

use crate::game::GameModel;
use crate::lp::PlayerProgram;
use crate::numerics::{seeded_rng, SeededRng, SparseMatrix};

fn diagonal_knapsack(
    name: &str,
    c: [f64; 2],
    cross: [f64; 2],
    a: [f64; 2],
    b: f64,
) -> PlayerProgram {
    PlayerProgram::new(
        name,
        c.to_vec(),
        SparseMatrix::from_triplets(2, 2, [(0, 0, cross[0]), (1, 1, cross[1])])
            .expect("static data"),
        SparseMatrix::from_triplets(1, 2, [(0, 0, a[0]), (0, 1, a[1])]).expect("static data"),
        vec![b],
        vec![0, 1],
        vec![(0.0, 1.0); 2],
    )
    .expect("static data")
}

/// The two-player knapsack game, in minimization form:
///
/// ```text
/// blue: min −x₁ − 2x₂ + 2 y₁x₁ + 3 y₂x₂   s.t. 3x₁ + 4x₂ ≤ 5, x ∈ {0,1}²
/// red:  min −3y₁ − 5y₂ + 5 x₁y₁ + 4 x₂y₂  s.t. 2y₁ + 5y₂ ≤ 5, y ∈ {0,1}²
/// ```
///
/// Its equilibria are `(0,1; 1,0)`, `(1,0; 0,1)` and the mixed profile
/// with barycenters `(2/9, 7/9; 2/5, 3/5)`.
pub fn canonical_knapsack_game() -> GameModel {
    GameModel::new(vec![
        diagonal_knapsack("blue", [-1.0, -2.0], [2.0, 3.0], [3.0, 4.0], 5.0),
        diagonal_knapsack("red", [-3.0, -5.0], [5.0, 4.0], [2.0, 5.0], 5.0),
    ])
    .expect("static data")
}

/// Capacity of a knapsack row from the sum of its weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacityRule {
    /// `⌈Σa / 2⌉`
    #[default]
    HalfSum,
    /// `Σa`: every packing fits.
    FullSum,
}

impl CapacityRule {
    fn apply(self, weights: &[i64]) -> i64 {
        let s: i64 = weights.iter().sum();
        match self {
            CapacityRule::HalfSum => (s + 1) / 2,
            CapacityRule::FullSum => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub players: usize,
    pub items: usize,
    /// Coefficients are drawn from `[−range, range]` (costs from
    /// `[−range, −1]`, weights from `[1, range]`).
    pub range: i64,
    pub capacity: CapacityRule,
}

impl GeneratorSpec {
    pub fn new(seed: u64, players: usize, items: usize, range: i64) -> Self {
        GeneratorSpec {
            seed,
            players,
            items,
            range,
            capacity: CapacityRule::HalfSum,
        }
    }
}

/// Random 0/1 knapsack player: costs in `[-range, -1]`, cross terms in
/// `[-range, range]`, weights in `[1, range]`, capacity from `rule`.
pub fn random_knapsack_program(
    rng: &mut SeededRng,
    name: &str,
    items: usize,
    params: usize,
    range: i64,
    rule: CapacityRule,
) -> PlayerProgram {
    let range = range.max(1);
    let cost: Vec<f64> = (0..items)
        .map(|_| rng.random_range(-range..=-1) as f64)
        .collect();
    let mut cross = Vec::new();
    for r in 0..params {
        for c in 0..items {
            cross.push((r, c, rng.random_range(-range..=range) as f64));
        }
    }
    let weights: Vec<i64> = (0..items).map(|_| rng.random_range(1..=range)).collect();
    let capacity = rule.apply(&weights);
    PlayerProgram::new(
        name,
        cost,
        SparseMatrix::from_triplets(params, items, cross).expect("generated indices are in range"),
        SparseMatrix::from_triplets(
            1,
            items,
            weights.iter().enumerate().map(|(j, w)| (0, j, *w as f64)),
        )
        .expect("generated indices are in range"),
        vec![capacity as f64],
        (0..items).collect(),
        vec![(0.0, 1.0); items],
    )
    .expect("generated program is well formed")
}

/// Deterministic in `spec.seed`.
pub fn random_knapsack_game(spec: &GeneratorSpec) -> GameModel {
    let mut rng = seeded_rng(spec.seed);
    let params = spec.items * spec.players.saturating_sub(1);
    let players = (0..spec.players)
        .map(|i| {
            random_knapsack_program(
                &mut rng,
                &format!("player{i}"),
                spec.items,
                params,
                spec.range,
                spec.capacity,
            )
        })
        .collect();
    GameModel::new(players).expect("generated dimensions are consistent")
}

/// Two players, one binary variable each, no pure equilibrium; the mixed
/// equilibrium is `(1/2; 1/2)`.
pub fn matching_pennies() -> GameModel {
    let player = |name: &str, c: f64, cross: f64| {
        PlayerProgram::new(
            name,
            vec![c],
            SparseMatrix::from_triplets(1, 1, [(0, 0, cross)]).expect("static data"),
            SparseMatrix::new(0, 1),
            vec![],
            vec![0],
            vec![(0.0, 1.0)],
        )
        .expect("static data")
    };
    GameModel::new(vec![player("blue", 2.0, -4.0), player("red", -2.0, 4.0)]).expect("static data")
}

/// One player whose constraints `x ≤ −1`, `x ≥ 0` admit no point.
pub fn infeasible_player() -> PlayerProgram {
    PlayerProgram::new(
        "empty",
        vec![1.0],
        SparseMatrix::new(0, 1),
        SparseMatrix::from_triplets(1, 1, [(0, 0, 1.0)]).expect("static data"),
        vec![-1.0],
        vec![0],
        vec![(0.0, 1.0)],
    )
    .expect("static data")
}
