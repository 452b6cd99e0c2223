//! Experiment configuration files.
//!
//! ```json
//! { "game": "games/mp.json",
//!   "regularizers": ["entropic", "euclidean"],
//!   "x0": [[0.8, 0.2], [0.5, 0.5]],
//!   "T": 50, "h": 0.001, "method": "rk4", "sample_every": 10,
//!   "analyses": ["coupling", "regret", {"recurrence": {"epsilon": 0.01, "t_min": 1}}, "support"] }
//! ```
//!
//! Exactly one of `x0`, `y0` and `"random": true` sets the initial condition.
//! `x0` is mapped to scores by the regularizer's pre-image with the last
//! coordinate pinned to zero (`y = log(x / x_last)` for the entropy,
//! `y = x − x_last` for the quadratic penalty).

use std::path::{Path, PathBuf};

use forel_core::schema::GameFile;
use forel_core::{GameSpec, Method, MixedProfile, Regularizer, RegularizerKind, ScoreState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSource {
    Path(PathBuf),
    Inline(Box<GameFile>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegularizerNames {
    All(String),
    PerPlayer(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceSpec {
    pub epsilon: f64,
    #[serde(default)]
    pub t_min: f64,
}

impl Default for RecurrenceSpec {
    fn default() -> Self {
        RecurrenceSpec {
            epsilon: 1e-2,
            t_min: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisSpec {
    Coupling,
    Regret,
    Divergence,
    Recurrence(RecurrenceSpec),
    Support,
}

/// Grid for the `sweep` command: every seed is combined with every
/// regularizer assignment, each run starting from a random interior profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub seeds: Vec<u64>,
    pub regularizers: Vec<RegularizerNames>,
    #[serde(default)]
    pub write_runs: bool,
}

pub const MAX_SWEEP_RUNS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameSource,
    pub regularizers: RegularizerNames,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub random: bool,
    #[serde(rename = "T")]
    pub duration: f64,
    pub h: f64,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default)]
    pub analyses: Vec<AnalysisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_method() -> String {
    "rk4".into()
}

fn default_sample_every() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if let GameSource::Path(p) = &cfg.game {
            if p.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.game = GameSource::Path(base.join(p));
            }
        }
        Ok(cfg)
    }

    /// Short digest of the configuration (first 16 hex digits of SHA-256
    /// over its JSON form).
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }

    pub fn recurrence(&self) -> Option<RecurrenceSpec> {
        self.analyses.iter().find_map(|a| match a {
            AnalysisSpec::Recurrence(r) => Some(*r),
            _ => None,
        })
    }

    pub fn wants(&self, analysis: AnalysisSpec) -> bool {
        self.analyses
            .iter()
            .any(|a| std::mem::discriminant(a) == std::mem::discriminant(&analysis))
    }
}

pub fn load_game(source: &GameSource) -> Result<GameSpec> {
    match source {
        GameSource::Inline(file) => Ok((**file).clone().into_spec()?),
        GameSource::Path(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read game {}: {e}", p.display())))?;
            forel_core::parse_game(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

pub fn regularizers(names: &RegularizerNames, game: &GameSpec) -> Result<Vec<Regularizer>> {
    let kinds: Vec<RegularizerKind> = match names {
        RegularizerNames::All(n) => vec![n.parse()?; game.num_players()],
        RegularizerNames::PerPlayer(v) => v
            .iter()
            .map(|n| n.parse::<RegularizerKind>())
            .collect::<Result<_, _>>()?,
    };
    if kinds.len() != game.num_players() {
        return Err(CliError::Config(format!(
            "`regularizers` lists {} entries for {} players",
            kinds.len(),
            game.num_players()
        )));
    }
    Ok(kinds
        .iter()
        .zip(game.actions())
        .map(|(&k, &n)| Regularizer::new(k, n))
        .collect::<Result<_, _>>()?)
}

/// A configuration checked and resolved into library types.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub game: GameSpec,
    pub regs: Vec<Regularizer>,
    pub y0: ScoreState,
    pub method: Method,
    pub x_star: Option<MixedProfile>,
}

impl Experiment {
    pub fn resolve(config: ExperimentConfig) -> Result<Self> {
        let game = load_game(&config.game)?;
        let regs = regularizers(&config.regularizers, &game)?;
        Self::resolve_with(config, game, regs)
    }

    pub(crate) fn resolve_with(config: ExperimentConfig, game: GameSpec, regs: Vec<Regularizer>) -> Result<Self> {
        if !(config.duration > 0.0 && config.duration.is_finite()) {
            return Err(CliError::Config(format!("`T` must be positive, got {}", config.duration)));
        }
        if !(config.h > 0.0 && config.h <= config.duration) {
            return Err(CliError::Config(format!("`h` must satisfy 0 < h <= T, got {}", config.h)));
        }
        if config.sample_every == 0 {
            return Err(CliError::Config("`sample_every` must be at least 1".into()));
        }
        let method: Method = config.method.parse()?;
        let given = [config.x0.is_some(), config.y0.is_some(), config.random];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::Config(
                "exactly one of `x0`, `y0` and `\"random\": true` must be given".into(),
            ));
        }
        let y0 = if let Some(y) = &config.y0 {
            let y = ScoreState::new(y.clone())?;
            if y.as_slices().len() != regs.len()
                || y.as_slices().iter().zip(&regs).any(|(yi, r)| yi.len() != r.dim())
            {
                return Err(CliError::Config("`y0` does not match the action sets".into()));
            }
            y
        } else {
            let x = match &config.x0 {
                Some(x) => MixedProfile::new(x.clone()).map_err(|e| CliError::Config(format!("`x0`: {e}")))?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
                    MixedProfile::random_interior(game.actions(), &mut rng)
                }
            };
            preimage(&regs, &x)?
        };
        let x_star = match &config.x_star {
            Some(x) => {
                let x = MixedProfile::new(x.clone()).map_err(|e| CliError::Config(format!("`x_star`: {e}")))?;
                game.check_profile(&x)?;
                Some(x)
            }
            None => None,
        };
        Ok(Experiment {
            config,
            game,
            regs,
            y0,
            method,
            x_star,
        })
    }
}

pub fn preimage(regs: &[Regularizer], x: &MixedProfile) -> Result<ScoreState> {
    if x.num_players() != regs.len() {
        return Err(CliError::Config("`x0` does not match the number of players".into()));
    }
    let y = regs
        .iter()
        .zip(x.as_slices())
        .enumerate()
        .map(|(i, (r, xi))| r.preimage(xi).map_err(|e| CliError::Config(format!("`x0` player {i}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreState::new(y)?)
}
