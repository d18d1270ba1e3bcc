//! Modeling API and the JSON instance and result formats.

mod instance;
mod result;

use std::path::Path;

pub use instance::{InstanceDocument, PlayerRecord, SparseRecord};
pub use result::{EquilibriumRecord, PlayerResult, ResultDocument, StatsRecord, SupportPoint};

use crate::algorithms::{solve, Solution, SolverOptions};
use crate::error::{Error, Result};
use crate::game::GameModel;
use crate::lp::PlayerProgram;

/// An integer programming game under construction. Players are added,
/// then [`IpgModel::finalize`] locks the model; solving finalizes
/// implicitly.
#[derive(Debug, Clone)]
pub struct IpgModel {
    instance: InstanceDocument,
    game: Option<GameModel>,
}

impl IpgModel {
    pub fn new(name: impl Into<String>) -> Self {
        IpgModel {
            instance: InstanceDocument::new(name),
            game: None,
        }
    }

    pub fn from_instance(instance: InstanceDocument) -> Self {
        IpgModel {
            instance,
            game: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        InstanceDocument::load(path).map(Self::from_instance)
    }

    pub fn instance(&self) -> &InstanceDocument {
        &self.instance
    }

    pub fn is_finalized(&self) -> bool {
        self.game.is_some()
    }

    pub fn add_player(&mut self, p: &PlayerProgram, name: impl Into<String>) -> Result<()> {
        if self.is_finalized() {
            return Err(Error::Usage("the model is finalized".into()));
        }
        self.instance.add_player(p, name)
    }

    /// Validates and locks the model.
    pub fn finalize(&mut self) -> Result<&GameModel> {
        if self.game.is_none() {
            self.game = Some(self.instance.to_game()?);
        }
        Ok(self.game.as_ref().expect("just set"))
    }

    pub fn solve(&mut self, opts: &SolverOptions) -> Result<Solution> {
        let g = self.finalize()?;
        solve(g, opts)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.instance.save(path)
    }
}
