//! The published table of saturation coefficients and comparison against it.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::satcoeff::{saturation_coefficient_with_budget, ProblemSpec, QStrategy, ReferenceProblem};
use crate::sweep::MISSING;

const PUBLISHED: &str = include_str!("../data/table1.csv");

/// Agreement required between a computed value and its published four-decimal value.
pub const DEFAULT_TOLERANCE: f64 = 2e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedCell {
    pub strategy: QStrategy,
    pub problem: ReferenceProblem,
    pub p: usize,
    pub q: usize,
    pub r_factor: usize,
    pub r: usize,
    /// `None` where the table has no entry.
    pub value: Option<f64>,
}

impl PublishedCell {
    pub fn spec(&self) -> ProblemSpec {
        self.problem.spec(self.p, self.q, self.r)
    }
}

#[derive(Debug, Deserialize)]
struct RawCell {
    strategy: String,
    problem: String,
    p: usize,
    q: usize,
    r_factor: usize,
    r: usize,
    value: String,
}

pub fn parse_published(text: &str) -> Result<Vec<PublishedCell>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut cells = Vec::new();
    for (n, rec) in reader.deserialize::<RawCell>().enumerate() {
        let line = n + 2;
        let raw = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let value = match raw.value.trim() {
            MISSING => None,
            v => Some(v.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad value `{v}`") })?),
        };
        let cell = PublishedCell {
            strategy: raw.strategy.parse()?,
            problem: raw.problem.parse()?,
            p: raw.p,
            q: raw.q,
            r_factor: raw.r_factor,
            r: raw.r,
            value,
        };
        if cell.q != cell.strategy.q(cell.p) || cell.r != cell.r_factor * cell.q {
            return Err(Error::Parse { line, message: "degrees inconsistent with strategy".into() });
        }
        cells.push(cell);
    }
    Ok(cells)
}

/// The bundled published table.
pub fn published_table() -> Vec<PublishedCell> {
    parse_published(PUBLISHED).expect("bundled table parses")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub cell: PublishedCell,
    pub computed: Result<f64>,
}

impl ComparisonRow {
    pub fn difference(&self) -> Option<f64> {
        match (&self.computed, self.cell.value) {
            (Ok(mu), Some(v)) => Some((mu - v).abs()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn failures(&self) -> Vec<&ComparisonRow> {
        self.rows.iter().filter(|r| r.difference().is_none_or(|d| d > self.tolerance)).collect()
    }

    pub fn max_difference(&self) -> f64 {
        self.rows.iter().filter_map(ComparisonRow::difference).fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        !self.rows.is_empty() && self.failures().is_empty()
    }
}

/// Recomputes every published cell with `p <= max_p` and compares.
pub fn reproduce_table(max_p: usize, tolerance: f64, budget_seconds: Option<f64>) -> Result<ComparisonReport> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let cells: Vec<PublishedCell> =
        published_table().into_iter().filter(|c| c.p <= max_p && c.value.is_some()).collect();
    let unique: Vec<ProblemSpec> = cells.iter().map(PublishedCell::spec).collect::<HashSet<_>>().into_iter().collect();
    let computed: HashMap<ProblemSpec, Result<f64>> =
        unique.par_iter().map(|s| (*s, saturation_coefficient_with_budget(s, budget_seconds).map(|r| r.mu))).collect();
    let rows = cells.into_iter().map(|cell| ComparisonRow { cell, computed: computed[&cell.spec()].clone() }).collect();
    Ok(ComparisonReport { tolerance, rows })
}
