//! Batches of saturation coefficients over grids of problems and degrees,
//! with CSV and markdown output.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::assembly::{quotient_space, tensor_space, ProductSpace};
use crate::error::{Error, Result};
use crate::satcoeff::{saturation_coefficient_with_budget, Family, ProblemSpec, QStrategy, ReferenceProblem};

pub const CSV_HEADER: [&str; 12] =
    ["family", "edge_class", "p", "q", "r", "mu", "mu_display", "dim_H", "dim_V", "dim_F", "wall_seconds", "status"];

/// Per-cell wall-clock budget used when a configuration does not set one.
pub const DEFAULT_BUDGET_SECONDS: f64 = 300.0;
/// Placeholder for cells without a value.
pub const MISSING: &str = "---";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<OutputFormat> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::InvalidInput(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub strategies: Vec<QStrategy>,
    pub p_values: Vec<usize>,
    pub r_factors: Vec<usize>,
    pub problems: Vec<ReferenceProblem>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Cells exceeding this many seconds are reported as skipped.
    pub budget_seconds: Option<f64>,
    /// When false, wall-clock times are written as zero so reruns are byte-identical.
    pub record_timing: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    strategies: Vec<String>,
    p_values: Vec<usize>,
    #[serde(default = "default_r_factors")]
    r_factors: Vec<usize>,
    #[serde(default)]
    problems: Option<Vec<String>>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    budget_seconds: Option<f64>,
    #[serde(default = "default_true")]
    record_timing: bool,
}

fn default_r_factors() -> Vec<usize> {
    vec![2]
}

fn default_true() -> bool {
    true
}

impl SweepConfig {
    /// Parses a TOML configuration such as
    ///
    /// ```toml
    /// strategies = ["double"]
    /// p_values = [4, 8]
    /// r_factors = [2]
    /// problems = ["E1", "F1", "C"]   # optional, defaults to all ten
    /// format = "csv"                 # or "markdown"
    /// output = "table.csv"           # optional, defaults to stdout
    /// budget_seconds = 300           # optional
    /// record_timing = true           # optional
    /// ```
    pub fn from_toml(text: &str) -> Result<SweepConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        let strategies = raw.strategies.iter().map(|s| s.parse()).collect::<Result<Vec<QStrategy>>>()?;
        let problems = match raw.problems {
            Some(list) => list.iter().map(|s| s.parse()).collect::<Result<Vec<ReferenceProblem>>>()?,
            None => ReferenceProblem::ALL.to_vec(),
        };
        let format = match raw.format {
            Some(f) => f.parse()?,
            None => OutputFormat::Csv,
        };
        let config = SweepConfig {
            strategies,
            p_values: raw.p_values,
            r_factors: raw.r_factors,
            problems,
            output: raw.output,
            format,
            budget_seconds: raw.budget_seconds.or(Some(DEFAULT_BUDGET_SECONDS)),
            record_timing: raw.record_timing,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() {
            return Err(Error::InvalidInput("p_values must not be empty".into()));
        }
        if self.p_values.contains(&0) {
            return Err(Error::InvalidInput("p_values must be positive".into()));
        }
        if self.strategies.is_empty() || self.problems.is_empty() {
            return Err(Error::InvalidInput("strategies and problems must not be empty".into()));
        }
        if self.r_factors.is_empty() || self.r_factors.iter().any(|f| ![2, 4, 8].contains(f)) {
            return Err(Error::InvalidInput("r_factors must be a nonempty subset of {2, 4, 8}".into()));
        }
        if let Some(b) = self.budget_seconds {
            if b.is_nan() || b <= 0.0 {
                return Err(Error::InvalidInput("budget_seconds must be positive".into()));
            }
        }
        Ok(())
    }

    /// Specs in output order: problem, strategy, p, r factor.
    pub fn specs(&self) -> Vec<ProblemSpec> {
        let mut out = Vec::new();
        for prob in &self.problems {
            for s in &self.strategies {
                for &p in &self.p_values {
                    let q = s.q(p);
                    for &f in &self.r_factors {
                        out.push(prob.spec(p, q, f * q));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Ok,
    /// The cell ran past its budget.
    Skipped,
    Failed(String),
}

impl CellStatus {
    fn as_field(&self) -> String {
        match self {
            CellStatus::Ok => "ok".into(),
            CellStatus::Skipped => "skipped".into(),
            CellStatus::Failed(msg) => format!("failed: {msg}"),
        }
    }

    fn from_field(s: &str) -> Result<CellStatus> {
        match s {
            "ok" => Ok(CellStatus::Ok),
            "skipped" => Ok(CellStatus::Skipped),
            _ => s
                .strip_prefix("failed: ")
                .map(|m| CellStatus::Failed(m.to_string()))
                .ok_or_else(|| Error::InvalidInput(format!("unknown status `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub edge_class: String,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub mu: Option<f64>,
    pub dim_h: usize,
    pub dim_v: usize,
    pub dim_f: usize,
    pub wall_seconds: f64,
    pub status: CellStatus,
}

fn load_rows(family: Family, p: usize) -> usize {
    match family {
        Family::A => (p + 1) * (p + 1),
        Family::B => p + 1,
        Family::C => p,
    }
}

fn space_dim(spec: &ProblemSpec, degree: usize) -> usize {
    match spec.family {
        Family::C => quotient_space(degree).map(|s| s.dim()).unwrap_or(0),
        _ => tensor_space(spec.edges, degree).map(|s| s.dim()).unwrap_or(0),
    }
}

fn edge_class(spec: &ProblemSpec) -> String {
    ReferenceProblem::ALL
        .into_iter()
        .find(|p| p.family() == spec.family && p.edges() == spec.edges)
        .map(|p| p.name().to_string())
        .unwrap_or_else(|| spec.edges.to_string())
}

/// Computes one cell, turning errors into row statuses.
pub fn run_cell(spec: &ProblemSpec, budget_seconds: Option<f64>, record_timing: bool) -> SweepRow {
    let mut row = SweepRow {
        family: spec.family,
        edge_class: edge_class(spec),
        p: spec.p,
        q: spec.q,
        r: spec.r,
        mu: None,
        dim_h: space_dim(spec, spec.r),
        dim_v: space_dim(spec, spec.q),
        dim_f: load_rows(spec.family, spec.p),
        wall_seconds: 0.0,
        status: CellStatus::Ok,
    };
    match saturation_coefficient_with_budget(spec, budget_seconds) {
        Ok(res) => {
            row.mu = Some(res.mu);
            if record_timing {
                row.wall_seconds = res.wall_seconds;
            }
        }
        Err(Error::BudgetExceeded { .. }) => row.status = CellStatus::Skipped,
        Err(e) => row.status = CellStatus::Failed(e.to_string()),
    }
    row
}

/// Runs every cell of the configuration in parallel; rows come back in
/// [`SweepConfig::specs`] order. Identical specs are computed once.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let specs = config.specs();
    let unique: Vec<ProblemSpec> = specs.iter().copied().collect::<HashSet<_>>().into_iter().collect();
    let computed: HashMap<ProblemSpec, SweepRow> =
        unique.par_iter().map(|s| (*s, run_cell(s, config.budget_seconds, config.record_timing))).collect();
    Ok(specs.iter().map(|s| computed[s].clone()).collect())
}

fn display(mu: Option<f64>) -> String {
    mu.map_or_else(|| MISSING.to_string(), |m| format!("{m:.4}"))
}

fn fields(row: &SweepRow) -> [String; 12] {
    [
        row.family.to_string(),
        row.edge_class.clone(),
        row.p.to_string(),
        row.q.to_string(),
        row.r.to_string(),
        row.mu.map_or_else(String::new, |m| m.to_string()),
        display(row.mu),
        row.dim_h.to_string(),
        row.dim_v.to_string(),
        row.dim_f.to_string(),
        row.wall_seconds.to_string(),
        row.status.as_field(),
    ]
}

pub fn to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(fields(row)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::InvalidInput(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidInput("unexpected CSV header".into()));
    }
    let mut rows = Vec::new();
    for (n, rec) in reader.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let bad = |what: &str| Error::Parse { line, message: format!("bad {what}") };
        let int = |i: usize, what: &str| rec[i].parse::<usize>().map_err(|_| bad(what));
        let mu = if rec[5].is_empty() { None } else { Some(rec[5].parse::<f64>().map_err(|_| bad("mu"))?) };
        rows.push(SweepRow {
            family: rec[0].parse()?,
            edge_class: rec[1].to_string(),
            p: int(2, "p")?,
            q: int(3, "q")?,
            r: int(4, "r")?,
            mu,
            dim_h: int(7, "dim_H")?,
            dim_v: int(8, "dim_V")?,
            dim_f: int(9, "dim_F")?,
            wall_seconds: rec[10].parse().map_err(|_| bad("wall_seconds"))?,
            status: CellStatus::from_field(&rec[11])?,
        });
    }
    Ok(rows)
}

pub fn to_markdown(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", CSV_HEADER.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(CSV_HEADER.len()));
    for row in rows {
        let _ = writeln!(out, "| {} |", fields(row).join(" | "));
    }
    out
}

pub fn render(rows: &[SweepRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Markdown => Ok(to_markdown(rows)),
    }
}
