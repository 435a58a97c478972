//! CSV tables, JSON reports and gnuplot scripts. Tables are written with the
//! shortest round-trip float format so reruns produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| v.to_string()).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
    }
}

/// Reads a CSV with a header row; `column` selects one column by name.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .with_context(|| format!("no column `{column}` in {} (have: {})", path.display(), headers.iter().collect::<Vec<_>>().join(", ")))?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let v: f64 = rec[idx].parse().with_context(|| format!("row {}: `{}` is not a number", line + 2, &rec[idx]))?;
        out.push(v);
    }
    Ok(out)
}

/// Destination directory plus a file stem shared by the table, the report
/// and the plot script of one command.
pub struct Sink {
    pub dir: PathBuf,
    pub stem: String,
}

impl Sink {
    pub fn new(dir: &Path, stem: &str) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), stem: stem.to_string() })
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    pub fn csv(&self, suffix: &str, table: &Table) -> Result<PathBuf> {
        let p = self.path(&format!("{suffix}.csv"));
        fs::write(&p, table.to_csv()?).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }

    /// JSON report with the resolved configuration embedded under `config`.
    pub fn report<T: Serialize>(&self, config: &ExperimentConfig, body: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            config: &'a ExperimentConfig,
            #[serde(flatten)]
            body: &'a T,
        }
        let p = self.path(".json");
        let text = serde_json::to_string_pretty(&Wrapped { config, body })?;
        fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }

    pub fn script(&self, text: &str) -> Result<PathBuf> {
        let p = self.path(".gp");
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axes {
    Linear,
    LogLog,
    LogX,
}

/// gnuplot script plotting columns `ys` (1-based) of a CSV against column `x`.
pub fn gnuplot_script(csv_name: &str, title: &str, axes: Axes, x: usize, ys: &[(usize, &str)]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str(&format!("set title '{title}'\nset terminal pngcairo size 900,600\n"));
    s.push_str(&format!("set output '{}.png'\n", csv_name.trim_end_matches(".csv")));
    match axes {
        Axes::LogLog => s.push_str("set logscale xy\n"),
        Axes::LogX => s.push_str("set logscale x\n"),
        Axes::Linear => {}
    }
    let plots: Vec<String> = ys.iter().map(|(c, name)| format!("'{csv_name}' using {x}:{c} with linespoints title '{name}'")).collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_bytes_stable() {
        let mut t = Table::new(["t", "y"]);
        t.push_floats(&[0.1, 1.0 / 3.0]);
        t.push_floats(&[1e-300, f64::MAX]);
        let a = t.to_csv().unwrap();
        assert_eq!(a, t.clone().to_csv().unwrap());
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("t,y\n0.1,0.3333333333333333\n"));
        let back: f64 = text.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, f64::MAX);
    }

    #[test]
    fn script_mentions_columns() {
        let s = gnuplot_script("a.csv", "x", Axes::LogLog, 1, &[(2, "n"), (3, "psi")]);
        assert!(s.contains("using 1:3") && s.contains("logscale xy"));
    }
}
