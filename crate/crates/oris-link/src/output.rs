//! CSV tables and companion plot scripts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
    B(bool),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::U(u) => u.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

impl From<u64> for Cell {
    fn from(u: u64) -> Self {
        Cell::U(u)
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// How the companion script draws a table.
#[derive(Debug, Clone)]
pub enum PlotSpec {
    /// One line per distinct combination of `group` columns.
    Lines { x: &'static str, y: &'static str, group: Vec<&'static str>, logy: bool },
    /// Colour map of `z` over `x` and a log-scaled `y`.
    Map { x: &'static str, y: &'static str, z: &'static str },
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<PlotSpec>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self { name: name.into(), header: header.to_vec(), rows: Vec::new(), plot: None }
    }

    pub fn with_plot(mut self, plot: PlotSpec) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv_bytes(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }

    /// Writes `<name>.csv` and, if a plot is attached, `<name>.plot.py`.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        fs::write(&csv_path, self.to_csv_bytes()?)?;
        let mut written = vec![csv_path];
        if let Some(plot) = &self.plot {
            let script = dir.join(format!("{}.plot.py", self.name));
            fs::write(&script, plot_script(&format!("{}.csv", self.name), plot))?;
            written.push(script);
        }
        Ok(written)
    }
}

fn py_list(items: &[&str]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| format!("{s:?}")).collect();
    format!("[{}]", quoted.join(", "))
}

/// Standalone matplotlib script reading the CSV that sits next to it.
pub fn plot_script(csv_name: &str, spec: &PlotSpec) -> String {
    let head = format!(
        r#"#!/usr/bin/env python3
# Plots {csv_name}; run from any directory.
import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "{csv_name}"), newline="") as fh:
    rows = list(csv.DictReader(fh))

"#
    );
    let body = match spec {
        PlotSpec::Lines { x, y, group, logy } => format!(
            r#"groups = defaultdict(list)
for r in rows:
    groups[tuple(r[g] for g in {groups})].append((float(r["{x}"]), float(r["{y}"])))

fig, ax = plt.subplots()
for key, pts in groups.items():
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], label=" ".join(key) or None)
ax.set_xlabel("{x}")
ax.set_ylabel("{y}")
{logy}if len(groups) > 1:
    ax.legend()
"#,
            groups = py_list(group),
            logy = if *logy { "ax.set_yscale(\"log\")\n" } else { "" },
        ),
        PlotSpec::Map { x, y, z } => format!(
            r#"xs = sorted({{float(r["{x}"]) for r in rows}})
ys = sorted({{float(r["{y}"]) for r in rows}})
grid = [[float("nan")] * len(xs) for _ in ys]
for r in rows:
    grid[ys.index(float(r["{y}"]))][xs.index(float(r["{x}"]))] = float(r["{z}"])

fig, ax = plt.subplots()
mesh = ax.pcolormesh(xs, ys, grid, shading="nearest")
fig.colorbar(mesh, ax=ax, label="{z}")
ax.set_yscale("log")
ax.set_xlabel("{x}")
ax.set_ylabel("{y}")
"#
        ),
    };
    let stem = csv_name.trim_end_matches(".csv");
    format!("{head}{body}fig.savefig(os.path.join(here, \"{stem}.png\"), dpi=150)\n")
}
