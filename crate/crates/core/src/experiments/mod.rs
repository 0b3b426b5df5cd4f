//! Scripted numerical studies: each returns an [`ExperimentReport`] with
//! named verdicts (measured value vs threshold), tabular series and plots.
//!
//! Independent simulations inside an experiment run on the rayon pool;
//! results are always assembled in parameter order.

mod convergence;
mod data;
mod dispersion;
mod energy;
mod example41;
pub mod presets;
mod small_data;

#[cfg(test)]
mod tests;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::output::{write_table_csv, LinePlot};

pub use convergence::{cauchy_distance, run_epsilon_convergence};
pub use data::{interior_bump, interior_sine, normalize_hs, normalize_l2, random_smooth};
pub use dispersion::{fit_frequency, run_dispersion_check, DispersionCase, DispersionSetup};
pub use energy::{energy_tolerance, run_energy_inequality};
pub use example41::{run_example41, Example41Setup};
pub use small_data::{run_small_data, SmallDataSetup};

/// Comparison a verdict applies between its measured value and threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    LessThan,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    GreaterThan,
}

/// One checked invariant.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub invariant: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Verdict {
    pub fn new(invariant: impl Into<String>, measured: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => measured <= threshold,
            Relation::LessThan => measured < threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::GreaterThan => measured > threshold,
        };
        Verdict {
            invariant: invariant.into(),
            measured,
            relation,
            threshold,
            passed,
        }
    }

    pub fn at_most(invariant: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(invariant, measured, Relation::AtMost, threshold)
    }

    pub fn less_than(invariant: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(invariant, measured, Relation::LessThan, threshold)
    }

    pub fn at_least(invariant: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(invariant, measured, Relation::AtLeast, threshold)
    }

    pub fn greater_than(invariant: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(invariant, measured, Relation::GreaterThan, threshold)
    }

    /// Passes iff `measured` lies in [lo, hi]; recorded as the distance
    /// outside the interval (0 when inside) against threshold 0.
    pub fn within(invariant: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        let outside = if measured.is_nan() {
            f64::INFINITY
        } else {
            (lo - measured).max(measured - hi).max(0.0)
        };
        let mut v = Self::at_most(format!("{} in [{lo}, {hi}] (value {measured})", invariant.into()), outside, 0.0);
        v.passed = measured >= lo && measured <= hi;
        v
    }
}

/// A named numeric table, written as `<name>.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SeriesTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        SeriesTable {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: serde_json::Value,
    pub series: Vec<SeriesTable>,
    pub verdicts: Vec<Verdict>,
    /// Notes that are not pass/fail, e.g. a regime the data falls outside.
    pub notes: Vec<String>,
    /// Paths written by [`ExperimentReport::write`], relative to its output
    /// directory.
    pub files: Vec<PathBuf>,
    #[serde(skip)]
    pub plots: Vec<(String, LinePlot)>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, parameters: serde_json::Value) -> Self {
        ExperimentReport {
            name: name.into(),
            parameters,
            series: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            files: Vec::new(),
            plots: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    pub fn verdict(&self, invariant_prefix: &str) -> Option<&Verdict> {
        self.verdicts
            .iter()
            .find(|v| v.invariant.starts_with(invariant_prefix))
    }

    pub fn series(&self, name: &str) -> Option<&SeriesTable> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Writes `<dir>/<name>/{report.json, *.csv, *.svg}` and returns the
    /// experiment directory.
    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        let out = dir.join(&self.name);
        fs::create_dir_all(&out)?;
        self.files.clear();
        for table in &self.series {
            let file = format!("{}.csv", table.name);
            let headers: Vec<&str> = table.columns.iter().map(String::as_str).collect();
            let mut buf = Vec::new();
            write_table_csv(&mut buf, &headers, &table.rows)?;
            fs::write(out.join(&file), buf)?;
            self.files.push(file.into());
        }
        for (name, plot) in &self.plots {
            let file = format!("{name}.svg");
            fs::write(out.join(&file), plot.render())?;
            self.files.push(file.into());
        }
        self.files.push("report.json".into());
        let json = serde_json::to_string_pretty(&*self)?;
        fs::write(out.join("report.json"), json + "\n")?;
        Ok(out)
    }

    /// One line per verdict: `PASS|FAIL invariant: measured rel threshold`.
    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}\n", self.name, if self.passed() { "PASS" } else { "FAIL" });
        for v in &self.verdicts {
            let rel = match v.relation {
                Relation::AtMost => "<=",
                Relation::LessThan => "<",
                Relation::AtLeast => ">=",
                Relation::GreaterThan => ">",
            };
            s.push_str(&format!(
                "  {} {}: {:.6e} {rel} {:.6e}\n",
                if v.passed { "PASS" } else { "FAIL" },
                v.invariant,
                v.measured,
                v.threshold
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s
    }
}
