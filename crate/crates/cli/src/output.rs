//! CSV, JSON, SVG and run-manifest writers.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Full double precision: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus one row per record, comma separated.
pub fn csv_string(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Rows as an array of objects keyed by the header.
pub fn json_rows(header: &[&str], rows: &[Vec<f64>]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> =
                    header.iter().zip(r).map(|(h, &v)| (h.to_string(), serde_json::json!(v))).collect();
                serde_json::Value::Object(obj)
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A named table on its way to disk or stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        Self { name: name.into(), header, rows }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => csv_string(&self.header, &self.rows),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json_rows(&self.header, &self.rows)).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }

    pub fn file_name(&self, format: Format) -> String {
        match format {
            Format::Csv => format!("{}.csv", self.name),
            Format::Json => format!("{}.json", self.name),
        }
    }
}

/// Static line plot of one or more series.
pub fn svg_line_plot(title: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let (w, h, pad) = (800.0, 400.0, 50.0);
    let pts = series.iter().flat_map(|s| s.1.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        if x.is_finite() && y.is_finite() {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="25" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for (label, xs, anchor) in [(x0, pad, "start"), (x1, w - pad, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{xs}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{label:.4}</text>"#,
            h - pad + 15.0
        );
    }
    for (label, ys) in [(y0, h - pad), (y1, pad + 10.0)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ys}" font-family="sans-serif" font-size="11" text-anchor="end">{label:.4}</text>"#,
            pad - 4.0
        );
    }
    for (i, (name, data)) in series.iter().enumerate() {
        let c = colors[i % colors.len()];
        let path: Vec<String> = data
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1" points="{}"/>"#, path.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{c}">{}</text>"#,
            pad + 8.0,
            pad + 16.0 + 14.0 * i as f64,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub versions: Versions,
    pub threads: usize,
    pub elapsed_seconds: f64,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub fracsim_cli: &'static str,
    pub fracsim_core: &'static str,
}

impl Default for Versions {
    fn default() -> Self {
        Self { fracsim_cli: env!("CARGO_PKG_VERSION"), fracsim_core: fracsim_core::VERSION }
    }
}

/// Where rendered artifacts go: a directory (with manifest) or stdout.
#[derive(Debug, Clone)]
pub enum Sink {
    Stdout,
    Dir(PathBuf),
}

impl Sink {
    /// Writes `contents` and returns the file name it was written under.
    pub fn emit(&self, name: &str, contents: &str) -> io::Result<String> {
        match self {
            Sink::Stdout => {
                print!("{contents}");
                Ok(name.to_string())
            }
            Sink::Dir(d) => {
                fs::create_dir_all(d)?;
                fs::write(d.join(name), contents)?;
                Ok(name.to_string())
            }
        }
    }

    /// Files such as SVG plots are skipped on stdout.
    pub fn emit_file_only(&self, name: &str, contents: &str) -> io::Result<Option<String>> {
        match self {
            Sink::Stdout => Ok(None),
            Sink::Dir(_) => self.emit(name, contents).map(Some),
        }
    }

    pub fn write_manifest(&self, m: &RunManifest) -> io::Result<()> {
        if let Sink::Dir(d) = self {
            let s = serde_json::to_string_pretty(m).map_err(io::Error::other)?;
            fs::write(d.join("manifest.json"), s + "\n")?;
        }
        Ok(())
    }

    pub fn dir(&self) -> Option<&Path> {
        match self {
            Sink::Dir(d) => Some(d),
            Sink::Stdout => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_f64(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_f64(std::f64::consts::PI).parse::<f64>().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn csv_layout() {
        let s = csv_string(&["lag", "value"], &[vec![0.0, 1.0], vec![1.0, 0.5]]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "lag,value");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2].split(',').count(), 2);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let s = svg_line_plot("a<b", &[("x", vec![(0.0, 1.0), (1.0, 2.0)])]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a&lt;b"));
    }
}
