//! Equilibrium algorithms: the Cut-And-Play outer approximation loop and
//! full enumeration for small games.

mod cut_and_play;
pub mod cuts;
mod enumeration;
mod purify;

use std::time::Duration;

pub use cut_and_play::{
    cut_and_play, cut_and_play_observed, refine_region, separation_oracle, Observation,
    OuterApproximation, PlayerApproximation, Separation,
};
pub use enumeration::{full_enumeration, pure_strategies, MAX_PROFILES};

use crate::error::{usage, Result};
use crate::game::{EquilibriumResult, EquilibriumStatus, GameModel, SolveStats};
use crate::lcp::LcpMethod;
use crate::numerics::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    CutAndPlay,
    FullEnumeration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub algorithm: Algorithm,
    /// `tolerances.deviation_eps` is the equilibrium threshold.
    pub tolerances: Tolerances,
    pub time_limit: Option<Duration>,
    pub workers: usize,
    pub lcp_method: LcpMethod,
    pub max_iterations: usize,
    /// Rounds of Gomory cuts allowed per player before branching.
    pub max_gomory_rounds: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            algorithm: Algorithm::CutAndPlay,
            tolerances: Tolerances::default(),
            time_limit: None,
            workers: 1,
            lcp_method: LcpMethod::Branching,
            max_iterations: 100,
            max_gomory_rounds: 5,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if self.workers == 0 {
            return Err(usage("worker count must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(usage("iteration limit must be positive"));
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(usage("time limit must be positive"));
        }
        Ok(())
    }
}

/// A run's headline result, plus every equilibrium found when the
/// algorithm enumerates.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub result: EquilibriumResult,
    pub equilibria: Option<Vec<EquilibriumResult>>,
}

/// Runs the selected algorithm. For full enumeration the headline result
/// is the first pure equilibrium, else the first mixed one.
pub fn solve(g: &GameModel, opts: &SolverOptions) -> Result<Solution> {
    opts.validate()?;
    match opts.algorithm {
        Algorithm::CutAndPlay => Ok(Solution {
            result: cut_and_play(g, opts)?,
            equilibria: None,
        }),
        Algorithm::FullEnumeration => {
            let start = std::time::Instant::now();
            match full_enumeration(g, opts) {
                Ok(all) => {
                    let result = all.first().cloned().unwrap_or_else(|| {
                        EquilibriumResult::without_profile(
                            EquilibriumStatus::NoEquilibriumFound,
                            SolveStats {
                                wall_time: start.elapsed(),
                                ..SolveStats::default()
                            },
                            "enumeration found no equilibrium",
                        )
                    });
                    Ok(Solution {
                        result,
                        equilibria: Some(all),
                    })
                }
                Err(e) => {
                    let stats = SolveStats {
                        wall_time: start.elapsed(),
                        ..SolveStats::default()
                    };
                    let status = match &e {
                        crate::Error::Infeasible(_) => EquilibriumStatus::Infeasible,
                        crate::Error::BudgetExhausted { .. }
                            if opts.time_limit.is_some_and(|t| start.elapsed() >= t) =>
                        {
                            EquilibriumStatus::TimeLimit
                        }
                        crate::Error::NumericalFailure(_) => EquilibriumStatus::NumericalFailure,
                        _ => return Err(e),
                    };
                    Ok(Solution {
                        result: EquilibriumResult::without_profile(status, stats, e.to_string()),
                        equilibria: None,
                    })
                }
            }
        }
    }
}
