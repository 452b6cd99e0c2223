use std::path::{Path, PathBuf};

use forel_core::analysis::{
    self, coupling_series, divergence_check, max_deviation, regret, regret_bound, trajectory_recurrence,
    CouplingReference, Divergence, SupportClass,
};
use forel_core::dynamics::reduce;
use forel_core::equilibrium::{self, EquilibriumReport};
use forel_core::schema::game_fingerprint;
use forel_core::{ForelSystem, GameSpec, MixedProfile, ReducedState, Trajectory, TrajectoryMeta};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    load_game, regularizers, AnalysisSpec, Experiment, ExperimentConfig, RecurrenceSpec, RegularizerNames,
    MAX_SWEEP_RUNS,
};
use crate::error::{CliError, Result};
use crate::io::{read_trajectory, trajectory_table, write_json, Cell, Format, Table};

/// Distance threshold used when classifying the tail of a trajectory.
pub const SUPPORT_TOL: f64 = 1e-2;
const DIVERGENCE_DELTA: f64 = 1e-4;
const DIVERGENCE_POINTS: usize = 100;

/// Equilibrium used as the coupling reference, with the maximal-support
/// report when the game is a two-player constant-sum game.
#[derive(Debug, Clone)]
pub struct Reference {
    pub x_star: MixedProfile,
    pub report: Option<EquilibriumReport>,
}

pub fn reference_for(game: &GameSpec, x_star: Option<&MixedProfile>) -> Option<Reference> {
    let report = if game.num_players() == 2 && game.is_constant_sum() {
        equilibrium::equilibrium_for_game(game)
            .map_err(|e| warn!("no maximal-support equilibrium: {e}"))
            .ok()
    } else {
        None
    };
    let x_star = match (x_star, &report) {
        (Some(x), _) => x.clone(),
        (None, Some(r)) => r.x_star.clone(),
        (None, None) => match equilibrium::interior_equilibrium(game) {
            Ok(x) => x,
            Err(e) => {
                warn!("no coupling reference: {e}");
                return None;
            }
        },
    };
    Some(Reference { x_star, report })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub game_hash: String,
    pub config_hash: String,
    pub method: String,
    pub h: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub sample_every: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceJson {
    pub epsilon: f64,
    pub t_min: f64,
    pub first_return_time: Option<f64>,
    pub min_distance_after_burn_in: f64,
    pub n_returns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceJson {
    pub max_abs: Option<f64>,
    pub evaluated: usize,
    pub skipped_at_kink: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Report {
    pub game_hash: String,
    pub samples: usize,
    #[serde(rename = "T")]
    pub duration: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Vec<Vec<f64>>>,
    #[serde(rename = "G_max_dev", skip_serializing_if = "Option::is_none")]
    pub g_max_dev: Option<f64>,
    #[serde(rename = "G_weighted_max_dev", skip_serializing_if = "Option::is_none")]
    pub g_weighted_max_dev: Option<f64>,
    /// Per player, the smallest `Ω_i/t − R_i(t)` over samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regret_margin: Option<Vec<f64>>,
    /// Per player, the smallest `B_i/t − R_i(t)` with `B_i` the bound for
    /// the actual initial scores (equal to `Ω_i` when they are zero).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regret_bound_margin: Option<Vec<f64>>,
    pub max_abs_z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<RecurrenceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub face_mass: Option<f64>,
}

/// Which parts of a [`Report`] to compute.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Selection {
    pub coupling: bool,
    pub regret: bool,
    pub divergence: bool,
    pub recurrence: Option<RecurrenceSpec>,
    pub support: bool,
}

impl Selection {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Selection {
            coupling: cfg.wants(AnalysisSpec::Coupling),
            regret: cfg.wants(AnalysisSpec::Regret),
            divergence: cfg.wants(AnalysisSpec::Divergence),
            recurrence: cfg.recurrence(),
            support: cfg.wants(AnalysisSpec::Support),
        }
    }

    /// Coupling, regret, recurrence and support, plus whatever the config adds.
    pub fn standard(cfg: &ExperimentConfig) -> Self {
        let chosen = Self::from_config(cfg);
        Selection {
            coupling: true,
            regret: true,
            divergence: chosen.divergence,
            recurrence: Some(chosen.recurrence.unwrap_or_default()),
            support: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Selection::default()
    }
}

fn class_name(c: &SupportClass) -> String {
    c.name().replace('-', "_")
}

/// Coupling series with unit weights and with weights `1/a_i`.
fn couplings(traj: &Trajectory, sys: &ForelSystem, r: Option<&Reference>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = traj.len();
    let Some(r) = r else {
        return Ok((vec![f64::NAN; n], vec![f64::NAN; n]));
    };
    let plain = CouplingReference::unweighted(r.x_star.clone());
    let weighted = CouplingReference::for_game(sys.game(), r.x_star.clone())?;
    Ok((
        coupling_series(traj, sys.regularizers(), &plain)?,
        coupling_series(traj, sys.regularizers(), &weighted)?,
    ))
}

fn regret_columns(traj: &Trajectory) -> Result<Vec<Vec<f64>>> {
    (0..traj.num_players())
        .map(|i| {
            let r = regret(traj, i)?;
            let mut col = vec![f64::NAN; traj.len() - r.len()];
            col.extend(r.into_iter().map(|(_, v)| v));
            Ok(col)
        })
        .collect()
}

pub fn diagnostics_table(traj: &Trajectory, sys: &ForelSystem, r: Option<&Reference>) -> Result<Table> {
    let n = traj.num_players();
    let mut header = vec!["t".to_string(), "G".into(), "G_weighted".into()];
    header.extend((1..=n).map(|i| format!("regret_{i}")));
    header.extend(["dist_to_x0".to_string(), "face_mass".into()]);
    let mut table = Table::new(header);

    let (g, gw) = couplings(traj, sys, r)?;
    let regrets = regret_columns(traj)?;
    let support = r.map(|r| equilibrium_support(&r.x_star));
    let x0 = &traj.profiles()[0];
    for (k, x) in traj.profiles().iter().enumerate() {
        let mut row = vec![Cell::Float(traj.times()[k]), Cell::Float(g[k]), Cell::Float(gw[k])];
        row.extend(regrets.iter().map(|c| Cell::Float(c[k])));
        row.push(Cell::Float(x.sup_distance(x0)));
        row.push(Cell::Float(
            support.as_ref().map_or(f64::NAN, |s| analysis::face_mass(x, s)),
        ));
        table.push(row);
    }
    Ok(table)
}

fn equilibrium_support(x: &MixedProfile) -> Vec<Vec<usize>> {
    x.as_slices()
        .iter()
        .map(|xi| (0..xi.len()).filter(|&a| xi[a] > equilibrium::ESSENTIAL_TOL).collect())
        .collect()
}

pub fn build_report(traj: &Trajectory, sys: &ForelSystem, r: Option<&Reference>, sel: Selection) -> Result<Report> {
    let mut rep = Report {
        game_hash: game_fingerprint(sys.game()),
        samples: traj.len(),
        duration: *traj.times().last().unwrap_or(&0.0),
        x_star: r.map(|r| r.x_star.as_slices().to_vec()),
        max_abs_z: traj.max_score_difference(),
        ..Report::default()
    };

    if sel.coupling && r.is_some() {
        let (g, gw) = couplings(traj, sys, r)?;
        rep.g_max_dev = Some(max_deviation(&g));
        rep.g_weighted_max_dev = Some(max_deviation(&gw));
    }

    if sel.regret {
        let y0 = &traj.states()[0];
        let mut omega_margin = Vec::new();
        let mut bound_margin = Vec::new();
        for (i, reg) in sys.regularizers().iter().enumerate() {
            let bound = regret_bound(reg, y0.player(i))?;
            let samples = regret(traj, i)?;
            let min_of = |b: f64| samples.iter().map(|(t, v)| b / t - v).fold(f64::INFINITY, f64::min);
            omega_margin.push(min_of(reg.omega()));
            bound_margin.push(min_of(bound));
        }
        rep.regret_margin = Some(omega_margin);
        rep.regret_bound_margin = Some(bound_margin);
    }

    if sel.divergence {
        rep.divergence = Some(divergence_along(traj, sys)?);
    }

    if let Some(spec) = sel.recurrence {
        let rr = trajectory_recurrence(traj, spec.epsilon, spec.t_min)?;
        rep.recurrence = Some(RecurrenceJson {
            epsilon: rr.epsilon,
            t_min: rr.t_min,
            first_return_time: rr.first_return_time,
            min_distance_after_burn_in: rr.min_distance_after_burn_in,
            n_returns: rr.n_returns,
        });
    }

    if sel.support {
        if let Some(r) = r {
            let support = equilibrium_support(&r.x_star);
            rep.face_mass = Some(analysis::face_mass(traj.profiles().last().unwrap(), &support));
            rep.classification = match &r.report {
                Some(eq) => Some(class_name(&analysis::support_classification(
                    traj.profiles(),
                    eq,
                    SUPPORT_TOL,
                )?)),
                None if r.x_star.is_interior(equilibrium::ESSENTIAL_TOL) => {
                    Some(class_name(&SupportClass::InteriorRecurrent))
                }
                None => None,
            };
            rep.support = Some(support);
        }
    }
    Ok(rep)
}

fn divergence_along(traj: &Trajectory, sys: &ForelSystem) -> Result<DivergenceJson> {
    let benchmark = ReducedState::default_benchmark(sys.game().actions());
    let stride = traj.len().div_ceil(DIVERGENCE_POINTS).max(1);
    let mut out = DivergenceJson {
        max_abs: None,
        evaluated: 0,
        skipped_at_kink: 0,
    };
    for y in traj.states().iter().step_by(stride) {
        match divergence_check(sys, &reduce(y, &benchmark)?, DIVERGENCE_DELTA)? {
            Divergence::Value(d) => {
                out.evaluated += 1;
                out.max_abs = Some(out.max_abs.unwrap_or(0.0).max(d.abs()));
            }
            Divergence::SkippedAtKink => out.skipped_at_kink += 1,
        }
    }
    Ok(out)
}

pub struct RunOutput {
    pub trajectory: Trajectory,
    pub diagnostics: Table,
    pub report: Report,
    pub meta: RunMeta,
}

pub fn run(exp: &Experiment, sel: Selection) -> Result<RunOutput> {
    let sys = ForelSystem::new(exp.game.clone(), exp.regs.clone())?;
    let cfg = &exp.config;
    info!(
        "integrating {} players over T = {} with h = {} ({})",
        exp.game.num_players(),
        cfg.duration,
        cfg.h,
        exp.method
    );
    let traj = sys.integrate(&exp.y0, cfg.duration, cfg.h, exp.method, cfg.sample_every)?;
    let reference = reference_for(&exp.game, exp.x_star.as_ref());
    let diagnostics = diagnostics_table(&traj, &sys, reference.as_ref())?;
    let report = build_report(&traj, &sys, reference.as_ref(), sel)?;
    let meta = RunMeta {
        game_hash: traj.meta().game_hash.clone(),
        config_hash: cfg.fingerprint(),
        method: exp.method.name().into(),
        h: cfg.h,
        duration: cfg.duration,
        sample_every: cfg.sample_every,
        samples: traj.len(),
    };
    Ok(RunOutput {
        trajectory: traj,
        diagnostics,
        report,
        meta,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

pub fn write_run(out: &RunOutput, dir: &Path, format: Format, with_report: bool) -> Result<()> {
    create_dir(dir)?;
    trajectory_table(&out.trajectory).write(&dir.join("trajectory.csv"), Format::Csv)?;
    out.diagnostics
        .write(&dir.join(format!("diagnostics.{}", format.extension())), format)?;
    write_json(&dir.join("run.json"), &out.meta)?;
    if with_report {
        write_report(&out.report, dir, format)?;
    }
    Ok(())
}

fn write_report(report: &Report, dir: &Path, format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(&dir.join("report.json"), report),
        Format::Csv => {
            let value = serde_json::to_value(report).expect("report serializes");
            let mut table = Table::new(["key", "value"]);
            if let serde_json::Value::Object(map) = value {
                for (k, v) in map {
                    table.push(vec![Cell::Text(k), Cell::Text(v.to_string())]);
                }
            }
            table.write(&dir.join("report.csv"), Format::Csv)
        }
    }
}

pub fn output_dir(cli_out: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    cli_out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("forel-out"))
}

pub fn cmd_simulate(config: &Path, out: Option<&Path>, seed: Option<u64>, format: Format) -> Result<PathBuf> {
    let mut cfg = ExperimentConfig::load(config)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let dir = output_dir(out, &cfg);
    let exp = Experiment::resolve(cfg)?;
    let sel = Selection::from_config(&exp.config);
    let result = run(&exp, sel)?;
    write_run(&result, &dir, format, !sel.is_empty())?;
    info!("wrote {} samples to {}", result.trajectory.len(), dir.display());
    Ok(dir)
}

pub fn cmd_analyze(config: &Path, trajectory: &Path, out: Option<&Path>, format: Format) -> Result<Report> {
    let cfg = ExperimentConfig::load(config)?;
    let game = load_game(&cfg.game)?;
    let regs = regularizers(&cfg.regularizers, &game)?;
    let sys = ForelSystem::new(game.clone(), regs)?;
    let game_hash = game_fingerprint(&game);

    let meta_path = trajectory.with_file_name("run.json");
    let mut meta = TrajectoryMeta {
        game_hash: game_hash.clone(),
        ..TrajectoryMeta::default()
    };
    if let Ok(text) = std::fs::read_to_string(&meta_path) {
        let run: RunMeta = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", meta_path.display())))?;
        if run.game_hash != game_hash {
            return Err(CliError::Config(format!(
                "trajectory was produced for game {} but the config describes game {game_hash}",
                run.game_hash
            )));
        }
        meta.step = run.h;
        meta.method = run.method.parse()?;
    }
    let traj = read_trajectory(trajectory, &sys, meta)?;
    let x_star = match &cfg.x_star {
        Some(x) => Some(MixedProfile::new(x.clone()).map_err(|e| CliError::Config(format!("`x_star`: {e}")))?),
        None => None,
    };
    let reference = reference_for(&game, x_star.as_ref());
    let report = build_report(&traj, &sys, reference.as_ref(), Selection::standard(&cfg))?;
    if let Some(dir) = out {
        create_dir(dir)?;
        write_report(&report, dir, format)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumJson {
    pub game_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub x_star: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essential: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<Vec<Vec<f64>>>,
    pub witnesses: Vec<WitnessJson>,
    pub nash_gaps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessJson {
    pub player: usize,
    pub action: usize,
    pub opponent_strategy: Vec<f64>,
    pub shortfall: f64,
}

/// Reads either a game file or an experiment config naming a game.
fn game_from(path: &Path) -> Result<GameSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if value.get("players").is_some() {
        forel_core::parse_game(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    } else {
        load_game(&ExperimentConfig::load(path)?.game)
    }
}

pub fn equilibrium_json(game: &GameSpec) -> Result<EquilibriumJson> {
    let (report, x_star) = if game.num_players() == 2 && game.is_constant_sum() {
        let r = equilibrium::equilibrium_for_game(game)?;
        let x = r.x_star.clone();
        (Some(r), x)
    } else {
        (None, equilibrium::interior_equilibrium(game)?)
    };
    let gaps = equilibrium::verify_nash(game, &x_star, 1e-9)?.gaps;
    Ok(EquilibriumJson {
        game_hash: game_fingerprint(game),
        value: report.as_ref().map(|r| r.value),
        x_star: x_star.as_slices().to_vec(),
        essential: report.as_ref().map(|r| r.essential.clone()),
        margins: report.as_ref().map(|r| r.margins.clone()),
        witnesses: report
            .map(|r| {
                r.witnesses
                    .into_iter()
                    .map(|w| WitnessJson {
                        player: w.player,
                        action: w.action,
                        opponent_strategy: w.opponent_strategy,
                        shortfall: w.shortfall,
                    })
                    .collect()
            })
            .unwrap_or_default(),
        nash_gaps: gaps,
    })
}

pub fn equilibrium_table(eq: &EquilibriumJson) -> Table {
    let mut table = Table::new(["player", "action", "x_star", "essential", "margin"]);
    for (i, xi) in eq.x_star.iter().enumerate() {
        for (a, &p) in xi.iter().enumerate() {
            let essential = eq.essential.as_ref().map_or(p > 0.0, |e| e[i].contains(&a));
            let margin = eq.margins.as_ref().map_or(f64::NAN, |m| m[i][a]);
            table.push(vec![
                Cell::Int(i as u64),
                Cell::Int(a as u64),
                Cell::Float(p),
                Cell::Int(essential as u64),
                Cell::Float(margin),
            ]);
        }
    }
    table
}

pub fn cmd_equilibrium(config: &Path, out: Option<&Path>, format: Format) -> Result<EquilibriumJson> {
    let game = game_from(config)?;
    let eq = equilibrium_json(&game)?;
    if let Some(dir) = out {
        create_dir(dir)?;
        match format {
            Format::Json => write_json(&dir.join("equilibrium.json"), &eq)?,
            Format::Csv => equilibrium_table(&eq).write(&dir.join("equilibrium.csv"), Format::Csv)?,
        }
    }
    Ok(eq)
}

pub const SUMMARY_HEADER: [&str; 11] = [
    "run",
    "seed",
    "regularizers",
    "config_hash",
    "G_max_dev",
    "G_weighted_max_dev",
    "regret_margin",
    "regret_bound_margin",
    "classification",
    "first_return_time",
    "n_returns",
];

fn names(r: &RegularizerNames, players: usize) -> String {
    match r {
        RegularizerNames::All(n) => vec![n.as_str(); players].join("+"),
        RegularizerNames::PerPlayer(v) => v.join("+"),
    }
}

fn min_or_nan(v: &Option<Vec<f64>>) -> f64 {
    v.as_ref().map_or(f64::NAN, |v| v.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Outcome of one sweep run.
pub enum SweepRow {
    Done { row: Vec<Cell>, output: Box<RunOutput> },
    Diverged { row: Vec<Cell>, last_time: f64 },
}

pub fn cmd_sweep(config: &Path, out: Option<&Path>, seed: Option<u64>, format: Format) -> Result<PathBuf> {
    let base = ExperimentConfig::load(config)?;
    let mut grid = base
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs a `sweep` section".into()))?;
    if let Some(s) = seed {
        let n = grid.seeds.len() as u64;
        grid.seeds = (s..s + n).collect();
    }
    let runs = grid.seeds.len() * grid.regularizers.len();
    if runs == 0 || runs > MAX_SWEEP_RUNS {
        return Err(CliError::Config(format!(
            "sweep grid has {runs} runs (must be between 1 and {MAX_SWEEP_RUNS})"
        )));
    }
    let game = load_game(&base.game)?;
    let dir = output_dir(out, &base);

    let mut jobs = Vec::with_capacity(runs);
    for assignment in &grid.regularizers {
        for &s in &grid.seeds {
            let mut cfg = base.clone();
            cfg.sweep = None;
            cfg.output = None;
            cfg.x0 = None;
            cfg.y0 = None;
            cfg.random = true;
            cfg.seed = Some(s);
            cfg.regularizers = assignment.clone();
            let regs = regularizers(assignment, &game)?;
            jobs.push(Experiment::resolve_with(cfg, game.clone(), regs)?);
        }
    }
    info!("sweeping {runs} runs");

    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .enumerate()
        .map(|(k, exp)| {
            let cfg = &exp.config;
            let mut row = vec![
                Cell::Int(k as u64),
                Cell::Int(cfg.seed.unwrap_or(0)),
                Cell::Text(names(&cfg.regularizers, game.num_players())),
                Cell::Text(cfg.fingerprint()),
            ];
            match run(exp, Selection::standard(cfg)) {
                Ok(output) => {
                    let rep = &output.report;
                    let rec = rep.recurrence.as_ref();
                    row.extend([
                        Cell::Float(rep.g_max_dev.unwrap_or(f64::NAN)),
                        Cell::Float(rep.g_weighted_max_dev.unwrap_or(f64::NAN)),
                        Cell::Float(min_or_nan(&rep.regret_margin)),
                        Cell::Float(min_or_nan(&rep.regret_bound_margin)),
                        Cell::Text(rep.classification.clone().unwrap_or_else(|| "none".into())),
                        Cell::Float(rec.and_then(|r| r.first_return_time).unwrap_or(f64::NAN)),
                        Cell::Int(rec.map_or(0, |r| r.n_returns as u64)),
                    ]);
                    Ok(SweepRow::Done {
                        row,
                        output: Box::new(output),
                    })
                }
                Err(CliError::Diverged { last_time }) => {
                    row.extend([
                        Cell::Float(f64::NAN),
                        Cell::Float(f64::NAN),
                        Cell::Float(f64::NAN),
                        Cell::Float(f64::NAN),
                        Cell::Text("diverged".into()),
                        Cell::Float(f64::NAN),
                        Cell::Int(0),
                    ]);
                    Ok(SweepRow::Diverged { row, last_time })
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    create_dir(&dir)?;
    let mut summary = Table::new(SUMMARY_HEADER);
    let mut diverged = None;
    for (k, r) in rows.into_iter().enumerate() {
        match r {
            SweepRow::Done { row, output } => {
                if grid.write_runs {
                    write_run(&output, &dir.join(format!("run_{k:05}")), format, true)?;
                }
                summary.push(row);
            }
            SweepRow::Diverged { row, last_time } => {
                warn!("run {k} diverged after t = {last_time}");
                diverged.get_or_insert(last_time);
                summary.push(row);
            }
        }
    }
    summary.write(&dir.join(format!("summary.{}", format.extension())), format)?;
    match diverged {
        Some(last_time) => Err(CliError::Diverged { last_time }),
        None => Ok(dir),
    }
}
