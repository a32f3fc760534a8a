//! CSV and JSON writers.
//!
//! CSV carries a header row; JSON is an object holding the tool name and
//! version, an echo of the request and a `rows` array whose objects use the
//! CSV column names. Reals are written with 9 significant digits.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::montecarlo::EnsembleStats;
use crate::numeric::round_significant;
use crate::sweep::{Design, DensityTable, SweepResult};

pub const TOOL: &str = "zenopm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => round_significant(*x, DIGITS).to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(x) => serde_json::Number::from_f64(round_significant(*x, DIGITS)).map_or(Value::Null, Value::Number),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

/// Column names plus rows of cells, written as CSV or JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn write<W: Write>(&self, format: Format, echo: &impl Serialize, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(echo, out),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(io_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io_error)?;
        }
        w.flush().map_err(io_error)
    }

    pub fn write_json<W: Write>(&self, echo: &impl Serialize, mut out: W) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| (name.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "spec": echo,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut out, &doc).map_err(io_error)?;
        writeln!(out).map_err(io_error)
    }
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Output(e.to_string())
}

pub fn sweep_table(result: &SweepResult) -> Table {
    Table {
        columns: vec!["r", "N", "sigma", "quantity", "value", "weakness", "flags"],
        rows: result
            .rows
            .iter()
            .map(|row| {
                vec![
                    Cell::Real(row.r),
                    Cell::Int(row.n),
                    Cell::Real(row.sigma),
                    Cell::Text(row.quantity.name().to_string()),
                    row.value.map_or(Cell::Missing, Cell::Real),
                    Cell::Real(row.weakness),
                    Cell::Text(row.flags.to_string()),
                ]
            })
            .collect(),
    }
}

pub fn density_table(table: &DensityTable) -> Table {
    Table {
        columns: vec![
            "Q",
            "exact_density",
            "approx_density",
            "r",
            "N",
            "sigma",
            "exact_density_normalized",
            "approx_density_normalized",
        ],
        rows: table
            .rows
            .iter()
            .map(|row| {
                vec![
                    Cell::Real(row.q),
                    Cell::Real(row.exact_density),
                    Cell::Real(row.approx_density),
                    Cell::Real(row.r),
                    Cell::Int(row.n),
                    Cell::Real(row.sigma),
                    Cell::Real(row.exact_density_normalized),
                    Cell::Real(row.approx_density_normalized),
                ]
            })
            .collect(),
    }
}

/// Per-stage attrition of a protective run, with the stage-conditional
/// survival probabilities used to simulate it.
pub fn attrition_table(stats: &EnsembleStats, profile: &[f64]) -> Table {
    Table {
        columns: vec!["stage", "lost", "alive", "stage_survival"],
        rows: stats
            .stage_losses
            .iter()
            .zip(stats.attrition_curve())
            .zip(profile)
            .enumerate()
            .map(|(k, ((lost, alive), s))| {
                vec![Cell::Int(k as u64 + 1), Cell::Int(*lost), Cell::Int(alive), Cell::Real(*s)]
            })
            .collect(),
    }
}

pub fn design_table(target: f64, r: f64, sigma: f64, design: Design) -> Table {
    let (n, feasible) = match design {
        Design::Stages(n) => (Cell::Int(n), "true"),
        Design::Infeasible => (Cell::Missing, "false"),
    };
    Table {
        columns: vec!["target_R", "r", "sigma", "N", "feasible"],
        rows: vec![vec![
            Cell::Real(target),
            Cell::Real(r),
            Cell::Real(sigma),
            n,
            Cell::Text(feasible.to_string()),
        ]],
    }
}
