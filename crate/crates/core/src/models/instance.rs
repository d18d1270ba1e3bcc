//! Instance documents: the JSON form of a game.
//!
//! ```json
//! {"name": "...", "players": [{"name", "vars", "c", "C": {"nrows", "ncols", "entries": [[r, c, v], ...]},
//!   "A": {...}, "b", "integers", "bounds": [[lb, ub], ...]}]}
//! ```
//!
//! Objectives are minimized. `null` in a bound stands for an infinite
//! one and is only allowed on continuous variables. The player order
//! fixes the row order of every `C`.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameModel;
use crate::lp::PlayerProgram;
use crate::numerics::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseRecord {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseRecord {
    fn from_matrix(m: &SparseMatrix) -> Self {
        SparseRecord {
            nrows: m.nrows(),
            ncols: m.ncols(),
            entries: m.triplets().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerRecord {
    pub name: String,
    pub vars: usize,
    pub c: Vec<f64>,
    #[serde(rename = "C")]
    pub cross: SparseRecord,
    #[serde(rename = "A")]
    pub constraints: SparseRecord,
    pub b: Vec<f64>,
    pub integers: Vec<usize>,
    pub bounds: Vec<[Option<f64>; 2]>,
}

impl PlayerRecord {
    pub fn from_program(p: &PlayerProgram, name: impl Into<String>) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        PlayerRecord {
            name: name.into(),
            vars: p.num_vars(),
            c: p.cost().to_vec(),
            cross: SparseRecord::from_matrix(p.cross()),
            constraints: SparseRecord::from_matrix(p.constraints()),
            b: p.rhs().to_vec(),
            integers: p.integers().to_vec(),
            bounds: p
                .bounds()
                .into_iter()
                .map(|(l, u)| [finite(l), finite(u)])
                .collect(),
        }
    }

    fn canonical(&self) -> Self {
        let mut r = self.clone();
        r.cross.entries.sort_by_key(|&(i, j, _)| (i, j));
        r.constraints.entries.sort_by_key(|&(i, j, _)| (i, j));
        r.integers.sort_unstable();
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub name: String,
    pub players: Vec<PlayerRecord>,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.into(),
        message: message.into(),
    }
}

fn check_sparse(path: &str, m: &SparseRecord, nrows: usize, ncols: usize) -> Result<SparseMatrix> {
    if m.nrows != nrows {
        return Err(invalid(
            format!("{path}.nrows"),
            format!("expected {nrows}, got {}", m.nrows),
        ));
    }
    if m.ncols != ncols {
        return Err(invalid(
            format!("{path}.ncols"),
            format!("expected {ncols}, got {}", m.ncols),
        ));
    }
    let mut seen = HashSet::new();
    for (k, &(r, c, v)) in m.entries.iter().enumerate() {
        let at = format!("{path}.entries[{k}]");
        if r >= nrows || c >= ncols {
            return Err(invalid(
                at,
                format!("entry ({r}, {c}) outside a {nrows}x{ncols} matrix"),
            ));
        }
        if !seen.insert((r, c)) {
            return Err(invalid(at, format!("duplicate entry ({r}, {c})")));
        }
        if !v.is_finite() {
            return Err(invalid(at, "value is not finite"));
        }
    }
    SparseMatrix::from_triplets(nrows, ncols, m.entries.iter().copied())
        .map_err(|e| invalid(path, e.to_string()))
}

fn check_vector(path: String, v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(invalid(
            path,
            format!("expected length {len}, got {}", v.len()),
        ));
    }
    if let Some(k) = v.iter().position(|x| !x.is_finite()) {
        return Err(invalid(format!("{path}[{k}]"), "value is not finite"));
    }
    Ok(())
}

impl InstanceDocument {
    pub fn new(name: impl Into<String>) -> Self {
        InstanceDocument {
            name: name.into(),
            players: Vec::new(),
        }
    }

    /// Appends a player. Fails on a duplicate name, and on a `C` whose
    /// row count can no longer match the other players' variables.
    pub fn add_player(&mut self, p: &PlayerProgram, name: impl Into<String>) -> Result<()> {
        let name = name.into();
        if self.players.iter().any(|q| q.name == name) {
            return Err(Error::Usage(format!("duplicate player name {name:?}")));
        }
        let existing: usize = self.players.iter().map(|q| q.vars).sum();
        if p.cross().nrows() < existing {
            return Err(Error::Usage(format!(
                "player {name:?}: C has {} rows but the other players already hold {existing} variables",
                p.cross().nrows()
            )));
        }
        let total = existing + p.num_vars();
        if let Some(q) = self.players.iter().find(|q| q.cross.nrows < total - q.vars) {
            return Err(Error::Usage(format!(
                "player {:?}: C has {} rows, fewer than the {} variables of its opponents",
                q.name,
                q.cross.nrows,
                total - q.vars
            )));
        }
        self.players.push(PlayerRecord::from_program(p, name));
        Ok(())
    }

    pub fn from_game(name: impl Into<String>, g: &GameModel) -> Self {
        InstanceDocument {
            name: name.into(),
            players: g
                .players()
                .iter()
                .map(|p| PlayerRecord::from_program(p, p.name()))
                .collect(),
        }
    }

    /// Checks every dimension and bound rule; errors carry the field path.
    pub fn validate(&self) -> Result<()> {
        self.to_game().map(|_| ())
    }

    pub fn to_game(&self) -> Result<GameModel> {
        if self.players.is_empty() {
            return Err(invalid("players", "an instance needs at least one player"));
        }
        let total: usize = self.players.iter().map(|p| p.vars).sum();
        let mut names = HashSet::new();
        let mut programs = Vec::with_capacity(self.players.len());
        for (i, rec) in self.players.iter().enumerate() {
            let at = format!("players[{i}]");
            if !names.insert(rec.name.as_str()) {
                return Err(invalid(
                    format!("{at}.name"),
                    format!("duplicate player name {:?}", rec.name),
                ));
            }
            let m = rec.vars;
            check_vector(format!("{at}.c"), &rec.c, m)?;
            let cross = check_sparse(&format!("{at}.C"), &rec.cross, total - m, m)?;
            let rows = rec.constraints.nrows;
            let constraints = check_sparse(&format!("{at}.A"), &rec.constraints, rows, m)?;
            check_vector(format!("{at}.b"), &rec.b, rows)?;
            let mut seen = vec![false; m];
            for (k, &j) in rec.integers.iter().enumerate() {
                if j >= m {
                    return Err(invalid(
                        format!("{at}.integers[{k}]"),
                        format!("index {j} out of range 0..{m}"),
                    ));
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(invalid(
                        format!("{at}.integers[{k}]"),
                        format!("index {j} listed twice"),
                    ));
                }
            }
            if rec.bounds.len() != m {
                return Err(invalid(
                    format!("{at}.bounds"),
                    format!("expected {m} pairs, got {}", rec.bounds.len()),
                ));
            }
            let mut bounds = Vec::with_capacity(m);
            for (j, [l, u]) in rec.bounds.iter().enumerate() {
                let bp = format!("{at}.bounds[{j}]");
                if seen[j] && (l.is_none() || u.is_none()) {
                    return Err(invalid(bp, "integer variables need finite bounds"));
                }
                let l = l.unwrap_or(f64::NEG_INFINITY);
                let u = u.unwrap_or(f64::INFINITY);
                if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY
                {
                    return Err(invalid(bp, format!("invalid bounds [{l}, {u}]")));
                }
                bounds.push((l, u));
            }
            let p = PlayerProgram::new(
                rec.name.clone(),
                rec.c.clone(),
                cross,
                constraints,
                rec.b.clone(),
                rec.integers.clone(),
                bounds,
            )
            .map_err(|e| invalid(at, e.to_string()))?;
            programs.push(p);
        }
        GameModel::new(programs).map_err(|e| invalid("players", e.to_string()))
    }

    /// Sorted sparse entries and integer indices.
    pub fn canonical(&self) -> Self {
        InstanceDocument {
            name: self.name.clone(),
            players: self.players.iter().map(PlayerRecord::canonical).collect(),
        }
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.canonical()).expect("documents serialize");
        s.push('\n');
        s
    }

    /// Parses and validates; the result is canonical.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: InstanceDocument =
            serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        doc.validate()?;
        Ok(doc.canonical())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        std::fs::write(path, self.to_json()).map_err(|e| io_error(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::from_json(&text)
    }
}

pub(super) fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}
