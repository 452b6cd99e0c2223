//! JSON file format for games.
//!
//! ```json
//! { "players": 2, "actions": [2, 2], "form": "polymatrix",
//!   "edges": [{"i": 0, "j": 1, "u_ij": [[1, -1], [-1, 1]], "u_ji": [[-1, 1], [1, -1]]}],
//!   "affine": [{"a": 1.0, "b": 0.0}, {"a": 1.0, "b": 0.0}],
//!   "constant_sum": true }
//! ```
//!
//! Players and actions are 0-based. Both edge matrices are `|A_i| × |A_j|`.
//! Normal-form games give `"tensors"`: one flat row-major payoff array per
//! player, player 0's action varying slowest.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::game::{Affine, Edge, GameForm, GameSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormTag {
    Polymatrix,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub i: usize,
    pub j: usize,
    pub u_ij: Vec<Vec<f64>>,
    pub u_ji: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineFile {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub actions: Vec<usize>,
    pub form: FormTag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensors: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<Vec<AffineFile>>,
    #[serde(default)]
    pub constant_sum: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

fn matrix(rows: &[Vec<f64>], shape: (usize, usize), what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::Shape(format!("{what} must be {}x{}", shape.0, shape.1)));
    }
    Ok(DMatrix::from_row_iterator(shape.0, shape.1, rows.iter().flatten().copied()))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl GameFile {
    pub fn into_spec(self) -> Result<GameSpec> {
        if self.players != self.actions.len() {
            return Err(Error::Shape(format!(
                "`players` is {} but `actions` lists {} players",
                self.players,
                self.actions.len()
            )));
        }
        let game = match self.form {
            FormTag::Polymatrix => {
                if self.tensors.is_some() {
                    return Err(Error::InvalidGame("polymatrix games take `edges`, not `tensors`".into()));
                }
                let n = self.actions.len();
                let mut edges = Vec::with_capacity(self.edges.len());
                for e in &self.edges {
                    if e.i >= n || e.j >= n {
                        return Err(Error::InvalidGame(format!(
                            "edge {{{}, {}}} references a missing player",
                            e.i, e.j
                        )));
                    }
                    let shape = (self.actions[e.i], self.actions[e.j]);
                    let what = format!("edge {{{}, {}}}", e.i, e.j);
                    edges.push(Edge::new(
                        e.i,
                        e.j,
                        matrix(&e.u_ij, shape, &format!("{what} u_ij"))?,
                        matrix(&e.u_ji, shape, &format!("{what} u_ji"))?,
                    ));
                }
                GameSpec::polymatrix(self.actions, edges, self.constant_sum)?
            }
            FormTag::Normal => {
                let tensors = self
                    .tensors
                    .ok_or_else(|| Error::InvalidGame("normal-form games need `tensors`".into()))?;
                GameSpec::normal_form(self.actions, tensors, self.constant_sum)?
            }
        };
        let game = match self.affine {
            Some(af) => game.with_affine(af.iter().map(|a| Affine::new(a.a, a.b)).collect())?,
            None => game,
        };
        match self.labels {
            Some(l) => game.with_labels(l),
            None => Ok(game),
        }
    }

    pub fn from_spec(game: &GameSpec) -> Self {
        let (form, edges, tensors) = match game.form() {
            GameForm::Polymatrix { edges } => (
                FormTag::Polymatrix,
                edges
                    .iter()
                    .map(|e| EdgeFile {
                        i: e.i,
                        j: e.j,
                        u_ij: rows(&e.u_ij),
                        u_ji: rows(&e.u_ji),
                    })
                    .collect(),
                None,
            ),
            GameForm::NormalForm { tensors } => (FormTag::Normal, Vec::new(), Some(tensors.clone())),
        };
        GameFile {
            players: game.num_players(),
            actions: game.actions().to_vec(),
            form,
            edges,
            tensors,
            affine: Some(
                game.affine()
                    .iter()
                    .map(|a| AffineFile { a: a.scale, b: a.offset })
                    .collect(),
            ),
            constant_sum: game.is_constant_sum(),
            labels: Some(game.labels().to_vec()),
        }
    }
}

/// Parses a game from its JSON text.
pub fn parse_game(json: &str) -> Result<GameSpec> {
    let file: GameFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidGame(format!("game JSON: {e}")))?;
    file.into_spec()
}

/// Short stable digest of a game (first 16 hex digits of SHA-256 over its
/// canonical JSON form).
pub fn game_fingerprint(game: &GameSpec) -> String {
    let json = serde_json::to_vec(&GameFile::from_spec(game)).expect("game serializes");
    hex::encode(&Sha256::digest(&json)[..8])
}
