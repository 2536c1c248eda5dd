//! CSV tables, JSON metadata sidecars and self-contained SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

/// Floats carry 17 significant digits so that a CSV round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Absent values are empty fields, never zero.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Columns of equal length, all floats.
    pub fn from_columns(header: &[&str], cols: &[&[f64]]) -> Self {
        let mut t = Self::new(header);
        let len = cols.iter().map(|c| c.len()).min().unwrap_or(0);
        for i in 0..len {
            t.push(cols.iter().map(|c| fmt_f64(c[i])).collect());
        }
        t
    }
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for r in &table.rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON sidecar written next to every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub schema_version: u32,
    pub code_version: String,
    pub experiment: String,
    pub config: RunConfig,
    pub wall_time_s: f64,
    pub files: Vec<String>,
    /// Experiment-specific summary and drift diagnostics.
    pub diagnostics: serde_json::Value,
}

impl Metadata {
    pub fn new(cfg: &RunConfig, wall_time_s: f64, diagnostics: serde_json::Value) -> Self {
        Self {
            schema_version: super::fourbody::SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: cfg.experiment.name().to_string(),
            config: cfg.clone(),
            wall_time_s,
            files: Vec::new(),
            diagnostics,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Writes `<stem>_<name>.csv` for each table, the plots when `cfg.plot`, and
/// `<stem>.json` last. Returns every path written.
pub fn emit_outputs(
    cfg: &RunConfig,
    stem: &str,
    tables: &[(&str, Table)],
    plots: &[(&str, String)],
    mut meta: Metadata,
) -> Result<Vec<PathBuf>> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("cannot create output directory {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for (name, t) in tables {
        let path = dir.join(format!("{stem}_{name}.csv"));
        write_csv(&path, t)?;
        files.push(path);
    }
    if cfg.plot {
        for (name, svg) in plots {
            let path = dir.join(format!("{stem}_{name}.svg"));
            fs::write(&path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            files.push(path);
        }
    }
    meta.files = files.iter().filter_map(|p| p.file_name()).map(|s| s.to_string_lossy().into_owned()).collect();
    let path = dir.join(format!("{stem}.json"));
    fs::write(&path, meta.to_json()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    files.push(path);
    Ok(files)
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: [f64; 4] = [60.0, 20.0, 30.0, 50.0]; // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Points,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub style: Style,
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, xr: (f64, f64), yr: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x0, y0) = (MARGIN[0], H - MARGIN[3]);
    let (x1, y1) = (W - MARGIN[1], MARGIN[2]);
    let _ = write!(s, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (px, py) = (x0 + f * (x1 - x0), y0 - f * (y0 - y1));
        let _ = write!(s, r#"<text x="{px}" y="{}" text-anchor="middle">{}</text>"#, y0 + 16.0, tick(xr.0 + f * (xr.1 - xr.0)));
        let _ = write!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, x0 - 4.0, py + 4.0, tick(yr.0 + f * (yr.1 - yr.0)));
    }
    let _ = write!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 12.0, escape(xlabel));
    let _ = write!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Line or scatter plot; `log_y` plots `log10 y` and drops non-positive values.
pub fn svg_lines(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_y: bool) -> String {
    let ty = |y: f64| if log_y { if y > 0.0 { y.log10() } else { f64::NAN } } else { y };
    let xr = bounds(series.iter().flat_map(|s| s.x.iter().copied()));
    let yr = bounds(series.iter().flat_map(|s| s.y.iter().map(|&y| ty(y))));
    let px = |x: f64| MARGIN[0] + (x - xr.0) / (xr.1 - xr.0) * (W - MARGIN[0] - MARGIN[1]);
    let py = |y: f64| H - MARGIN[3] - (y - yr.0) / (yr.1 - yr.0) * (H - MARGIN[2] - MARGIN[3]);
    let mut s = header(title);
    axes(&mut s, xr, yr, xlabel, if log_y { "log10" } else { ylabel });
    for (i, ser) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> =
            ser.x.iter().zip(ser.y).map(|(&x, &y)| (x, ty(y))).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        match ser.style {
            Style::Line => {
                let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                let _ = write!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, d.join(" "));
            }
            Style::Points => {
                for &(x, y) in &pts {
                    let _ = write!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{c}"/>"#, px(x), py(y));
                }
            }
        }
        let ly = MARGIN[2] + 16.0 + 16.0 * i as f64;
        let _ = write!(s, r#"<text x="{}" y="{ly}" fill="{c}">{}</text>"#, W - MARGIN[1] - 150.0, escape(ser.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Heatmap of `z[iy * xs.len() + ix]` on a grey-to-blue ramp.
pub fn svg_heatmap(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64], z: &[f64]) -> String {
    let xr = bounds(xs.iter().copied());
    let yr = bounds(ys.iter().copied());
    let zr = bounds(z.iter().copied());
    let (nx, ny) = (xs.len().max(1), ys.len().max(1));
    let cw = (W - MARGIN[0] - MARGIN[1]) / nx as f64;
    let ch = (H - MARGIN[2] - MARGIN[3]) / ny as f64;
    let mut s = header(title);
    for iy in 0..ys.len() {
        for ix in 0..xs.len() {
            let v = z.get(iy * xs.len() + ix).copied().unwrap_or(f64::NAN);
            let f = if v.is_finite() { ((v - zr.0) / (zr.1 - zr.0)).clamp(0.0, 1.0) } else { 0.0 };
            let (r, g, b) = ((240.0 * (1.0 - f)) as u8, (240.0 * (1.0 - f) + 60.0 * f) as u8, (240.0 - 60.0 * f) as u8);
            let _ = write!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
                MARGIN[0] + ix as f64 * cw,
                H - MARGIN[3] - (iy + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes(&mut s, xr, yr, xlabel, ylabel);
    let _ = write!(s, r#"<text x="{}" y="{}" text-anchor="end">range {} .. {}</text>"#, W - MARGIN[1], H - 4.0, tick(zr.0), tick(zr.1));
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -2.5102056, 1e-300, std::f64::consts::PI, 123456789.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn svg_is_closed() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 0.1, 0.01];
        let s = svg_lines("t", "x", "y", &[Series { label: "a<b", x: &x, y: &y, style: Style::Line }], true);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n") && s.contains("a&lt;b"));
        let h = svg_heatmap("h", "x", "y", &x, &x[..2], &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(h.matches("<rect").count(), 2 + 6);
    }
}
