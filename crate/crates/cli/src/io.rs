//! Trajectory and table files.
//!
//! `trajectory.csv` is in long format, one row per sample, player and
//! action: `t,player,action,x,y,cum_v`. Floats are written with 17
//! significant digits so that re-reading reproduces them bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use forel_core::{ForelSystem, ScoreState, Trajectory, TrajectoryMeta};
use serde::Serialize;

use crate::error::{CliError, Result};

pub const TRAJECTORY_HEADER: [&str; 6] = ["t", "player", "action", "x", "y", "cum_v"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Float with 17 significant digits, which parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// A table with named columns, written as CSV or as a JSON array of records.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            // JSON has no NaN; missing values become null.
            Cell::Float(v) if !v.is_finite() => serde_json::Value::Null,
            Cell::Float(v) => (*v).into(),
            Cell::Text(s) => s.clone().into(),
        }
    }
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        let file = File::create(path).map_err(CliError::io(path))?;
        let mut out = BufWriter::new(file);
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush().map_err(CliError::io(path))?;
            }
            Format::Json => {
                let records: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|r| self.header.iter().cloned().zip(r.iter().map(Cell::json)).collect())
                    .collect();
                serde_json::to_writer_pretty(&mut out, &records).map_err(|e| CliError::io(path)(e.into()))?;
                out.write_all(b"\n").map_err(CliError::io(path))?;
                out.flush().map_err(CliError::io(path))?;
            }
        }
        Ok(())
    }
}

pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut table = Table::new(TRAJECTORY_HEADER);
    for (k, &t) in traj.times().iter().enumerate() {
        let y = traj.states()[k].as_slices();
        let x = traj.profiles()[k].as_slices();
        let v = &traj.cum_payoff_vec()[k];
        for i in 0..y.len() {
            for a in 0..y[i].len() {
                table.push(vec![
                    Cell::Float(t),
                    Cell::Int(i as u64),
                    Cell::Int(a as u64),
                    Cell::Float(x[i][a]),
                    Cell::Float(y[i][a]),
                    Cell::Float(v[i][a]),
                ]);
            }
        }
    }
    table
}

fn parse_f64(field: &str, what: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("trajectory line {line}: `{field}` is not a valid {what}")))
}

fn parse_index(field: &str, what: &str, line: u64) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("trajectory line {line}: `{field}` is not a valid {what}")))
}

/// Reads a trajectory written by [`trajectory_table`] for the system `sys`.
pub fn read_trajectory(path: &Path, sys: &ForelSystem, meta: TrajectoryMeta) -> Result<Trajectory> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != TRAJECTORY_HEADER {
        return Err(CliError::Config(format!(
            "{}: expected header `{}`",
            path.display(),
            TRAJECTORY_HEADER.join(",")
        )));
    }
    let actions = sys.game().actions().to_vec();
    let per_sample: usize = actions.iter().sum();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut cum = Vec::new();
    let mut y: Vec<Vec<f64>> = actions.iter().map(|&n| vec![0.0; n]).collect();
    let mut v = y.clone();
    let mut seen = 0usize;
    let mut expected = (0usize, 0usize);

    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != TRAJECTORY_HEADER.len() {
            return Err(CliError::Config(format!("trajectory line {line}: expected 6 fields")));
        }
        let t = parse_f64(&rec[0], "time", line)?;
        let i = parse_index(&rec[1], "player", line)?;
        let a = parse_index(&rec[2], "action", line)?;
        if (i, a) != expected {
            return Err(CliError::Config(format!(
                "trajectory line {line}: expected player {} action {}, found {i} {a}",
                expected.0, expected.1
            )));
        }
        if seen == 0 {
            times.push(t);
        } else if t.to_bits() != times.last().unwrap().to_bits() {
            return Err(CliError::Config(format!("trajectory line {line}: time changes inside a sample")));
        }
        y[i][a] = parse_f64(&rec[4], "score", line)?;
        v[i][a] = parse_f64(&rec[5], "cumulative payoff", line)?;
        seen += 1;
        expected = if a + 1 < actions[i] { (i, a + 1) } else { (i + 1, 0) };
        if seen == per_sample {
            states.push(ScoreState::new(y.clone())?);
            cum.push(v.clone());
            seen = 0;
            expected = (0, 0);
        }
    }
    if seen != 0 {
        return Err(CliError::Config("trajectory ends in the middle of a sample".into()));
    }
    if times.is_empty() {
        return Err(CliError::Config("trajectory has no samples".into()));
    }
    Trajectory::from_samples(sys, times, states, cum, meta)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::io(path))
}
