use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{CellResult, HarnessError, SweepResult};
use crate::interventions::Strategy;

const PANEL_W: f64 = 180.0;
const PANEL_H: f64 = 130.0;
const MARGIN: f64 = 36.0;
const GAP: f64 = 14.0;

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.iter().any(|&x| (x - v).abs() < 1e-12) {
            out.push(v);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn index_of(axis: &[f64], v: f64) -> usize {
    axis.iter().position(|&x| (x - v).abs() < 1e-12).expect("value on axis")
}

/// Polyline points; y is clamped to the [0, 1] axis.
fn points(xs: impl Iterator<Item = (f64, f64)>) -> String {
    let mut s = String::new();
    for (x, y) in xs {
        let _ = write!(s, "{:.2},{:.2} ", x, y);
    }
    s.trim_end().to_string()
}

fn panel(out: &mut String, cell: &CellResult, x0: f64, y0: f64) {
    let s = &cell.series;
    let last = (s.rounds().max(2) - 1) as f64;
    let px = |r: usize| x0 + PANEL_W * r as f64 / last;
    let py = |v: f64| y0 + PANEL_H * (1.0 - v.clamp(0.0, 1.0));

    let _ = writeln!(
        out,
        r##"  <g class="panel" data-visibility="{:.2}" data-budget="{:.2}">"##,
        cell.key.visibility, cell.key.budget
    );
    let _ = writeln!(
        out,
        r##"    <rect x="{x0:.2}" y="{y0:.2}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#888"/>"##
    );
    let upper = (0..s.rounds()).map(|r| (px(r), py(s.max[r])));
    let lower = (0..s.rounds()).rev().map(|r| (px(r), py(s.min[r])));
    let _ = writeln!(
        out,
        r##"    <polygon class="band" points="{}" fill="#9ecae1" fill-opacity="0.6" stroke="none"/>"##,
        points(upper.chain(lower))
    );
    let _ = writeln!(
        out,
        r##"    <polyline class="mean" points="{}" fill="none" stroke="#08519c" stroke-width="1.5"/>"##,
        points((0..s.rounds()).map(|r| (px(r), py(s.mean[r]))))
    );
    for (label, v) in [("0", 0.0), ("1", 1.0)] {
        let _ = writeln!(
            out,
            r##"    <text x="{:.2}" y="{:.2}" font-size="9" text-anchor="end">{label}</text>"##,
            x0 - 3.0,
            py(v) + 3.0
        );
    }
    let _ = writeln!(
        out,
        r##"    <text x="{:.2}" y="{:.2}" font-size="10">V={:.2} Q={:.2}</text>"##,
        x0 + 4.0,
        y0 + 12.0,
        cell.key.visibility,
        cell.key.budget
    );
    out.push_str("  </g>\n");
}

/// SVG for one strategy: a grid of potential-vs-round panels, visibility
/// down the rows and budget across the columns, each with the min–max band
/// and the mean line on a fixed [0, 1] axis.
pub fn emit_plot<W: Write>(r: &SweepResult, strategy: Strategy, mut sink: W) -> Result<(), HarnessError> {
    let cells: Vec<&CellResult> = r.cells.iter().filter(|c| c.key.strategy == strategy).collect();
    if cells.is_empty() {
        return Err(HarnessError::Validation(vec![format!("no cells for strategy {strategy}")]));
    }
    let vs = distinct(cells.iter().map(|c| c.key.visibility));
    let qs = distinct(cells.iter().map(|c| c.key.budget));
    let width = 2.0 * MARGIN + qs.len() as f64 * (PANEL_W + GAP) - GAP;
    let height = 2.0 * MARGIN + vs.len() as f64 * (PANEL_H + GAP) - GAP;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(
        out,
        r#"  <title>{} transmission potential, {} trials, seed {}</title>"#,
        strategy.id(),
        r.trials,
        r.seed
    );
    for cell in cells {
        let row = index_of(&vs, cell.key.visibility);
        let col = index_of(&qs, cell.key.budget);
        let x0 = MARGIN + col as f64 * (PANEL_W + GAP);
        let y0 = MARGIN + row as f64 * (PANEL_H + GAP);
        panel(&mut out, cell, x0, y0);
    }
    out.push_str("</svg>\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

/// One `<strategy>.svg` per strategy present, written into `dir`.
pub fn write_plots(r: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut strategies: Vec<Strategy> = Vec::new();
    for c in &r.cells {
        if !strategies.contains(&c.key.strategy) {
            strategies.push(c.key.strategy);
        }
    }
    let mut written = Vec::new();
    for s in strategies {
        let path = dir.join(format!("{}.svg", s.id()));
        let file = std::fs::File::create(&path).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        emit_plot(r, s, std::io::BufWriter::new(file))?;
        written.push(path);
    }
    Ok(written)
}
