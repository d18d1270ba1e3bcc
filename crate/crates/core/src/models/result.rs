//! Result documents written after a solve.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::instance::io_error;
use crate::algorithms::Solution;
use crate::error::{Error, Result};
use crate::game::{EquilibriumResult, EquilibriumStatus, GameModel, SolveStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportPoint {
    pub prob: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerResult {
    pub name: String,
    pub x: Vec<f64>,
    pub payoff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<SupportPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StatsRecord {
    pub iterations: usize,
    pub cuts: usize,
    pub branches: usize,
    pub lcp_nodes: usize,
    pub wall_time_ms: f64,
}

impl From<&SolveStats> for StatsRecord {
    fn from(s: &SolveStats) -> Self {
        StatsRecord {
            iterations: s.iterations,
            cuts: s.cuts,
            branches: s.branches,
            lcp_nodes: s.lcp_nodes,
            wall_time_ms: s.wall_time.as_secs_f64() * 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumRecord {
    pub status: String,
    pub players: Vec<PlayerResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub status: String,
    /// Empty when no profile is available.
    pub players: Vec<PlayerResult>,
    pub stats: StatsRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Every equilibrium, for algorithms that enumerate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<Vec<EquilibriumRecord>>,
}

fn player_results(g: &GameModel, r: &EquilibriumResult) -> Vec<PlayerResult> {
    let Some(profile) = &r.profile else {
        return Vec::new();
    };
    let payoffs = if r.payoffs.len() == g.num_players() {
        r.payoffs.clone()
    } else {
        g.payoffs(&profile.barycenters())
            .unwrap_or_else(|_| vec![f64::NAN; g.num_players()])
    };
    profile
        .strategies
        .iter()
        .zip(g.players())
        .zip(payoffs)
        .map(|((s, p), payoff)| PlayerResult {
            name: p.name().to_string(),
            x: s.barycenter.clone(),
            payoff,
            support: s.support.as_ref().map(|sup| {
                sup.iter()
                    .map(|(w, x)| SupportPoint {
                        prob: *w,
                        point: x.clone(),
                    })
                    .collect()
            }),
        })
        .collect()
}

impl ResultDocument {
    pub fn from_result(g: &GameModel, r: &EquilibriumResult) -> Self {
        ResultDocument {
            status: r.status.as_str().to_string(),
            players: player_results(g, r),
            stats: StatsRecord::from(&r.stats),
            message: r.message.clone(),
            equilibria: None,
        }
    }

    pub fn from_solution(g: &GameModel, s: &Solution) -> Self {
        let mut doc = Self::from_result(g, &s.result);
        doc.equilibria = s.equilibria.as_ref().map(|all| {
            all.iter()
                .map(|e| EquilibriumRecord {
                    status: e.status.as_str().to_string(),
                    players: player_results(g, e),
                })
                .collect()
        });
        doc
    }

    pub fn status(&self) -> Option<EquilibriumStatus> {
        EquilibriumStatus::parse(&self.status)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: ResultDocument =
            serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        if doc.status().is_none() {
            return Err(Error::Validation {
                path: "status".into(),
                message: format!("unknown status {:?}", doc.status),
            });
        }
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| io_error(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::from_json(&text)
    }
}
