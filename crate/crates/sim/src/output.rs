//! CSV tables and SVG line charts for sweep results.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::SweptParameter;
use crate::sweep::{ResultRow, SummaryRow};
use crate::SimError;

pub const RESULTS_HEADER: [&str; 10] = [
    "mode", "scheme", "value", "trial", "t_star", "m_star", "energy", "ee", "feasible", "powers",
];

pub const SUMMARY_HEADER: [&str; 13] = [
    "mode",
    "scheme",
    "value",
    "trials",
    "feasible",
    "excluded",
    "mean_ee",
    "ee_ci95",
    "mean_t_star",
    "t_star_ci95",
    "mean_m_star",
    "m_star_ci95",
    "single_trial",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            "both" => Ok(OutputFormat::Both),
            other => Err(SimError::config(
                "format",
                format!("expected csv, svg or both, got '{other}'"),
            )),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    mode: String,
    scheme: String,
    value: f64,
    trial: u64,
    t_star: Option<f64>,
    m_star: Option<usize>,
    energy: Option<f64>,
    ee: Option<f64>,
    feasible: bool,
    powers: String,
}

#[derive(Debug, Serialize)]
struct CsvSummary {
    mode: String,
    scheme: String,
    value: f64,
    trials: usize,
    feasible: usize,
    excluded: usize,
    mean_ee: Option<f64>,
    ee_ci95: Option<f64>,
    mean_t_star: Option<f64>,
    t_star_ci95: Option<f64>,
    mean_m_star: Option<f64>,
    m_star_ci95: Option<f64>,
    single_trial: bool,
}

fn csv_err(e: csv::Error) -> SimError {
    SimError::Csv(e.to_string())
}

fn join_powers(p: &[f64]) -> String {
    p.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes rows with a header line; an empty slice gives a header-only file.
pub fn write_results_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), SimError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(RESULTS_HEADER).map_err(csv_err)?;
    for r in rows {
        w.serialize(CsvRow {
            mode: r.mode.as_str().to_string(),
            scheme: r.scheme.as_str().to_string(),
            value: r.value,
            trial: r.trial,
            t_star: r.t_star,
            m_star: r.m_star,
            energy: r.energy,
            ee: r.ee,
            feasible: r.feasible,
            powers: join_powers(&r.powers),
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| SimError::Csv(e.to_string()))
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, SimError> {
    let mut rd = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in rd.deserialize::<CsvRow>() {
        let r = rec.map_err(csv_err)?;
        let powers = if r.powers.is_empty() {
            Vec::new()
        } else {
            r.powers
                .split(';')
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| SimError::Csv(format!("bad power value '{s}'")))
                })
                .collect::<Result<_, _>>()?
        };
        rows.push(ResultRow {
            mode: r.mode.parse()?,
            scheme: r.scheme.parse()?,
            value: r.value,
            trial: r.trial,
            t_star: r.t_star,
            m_star: r.m_star,
            energy: r.energy,
            ee: r.ee,
            feasible: r.feasible,
            powers,
        });
    }
    Ok(rows)
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), SimError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for s in rows {
        w.serialize(CsvSummary {
            mode: s.mode.as_str().to_string(),
            scheme: s.scheme.as_str().to_string(),
            value: s.value,
            trials: s.trials,
            feasible: s.feasible,
            excluded: s.excluded,
            mean_ee: s.mean_ee,
            ee_ci95: s.ee_half_width,
            mean_t_star: s.mean_t_star,
            t_star_ci95: s.t_star_half_width,
            mean_m_star: s.mean_m_star,
            m_star_ci95: s.m_star_half_width,
            single_trial: s.single_trial,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| SimError::Csv(e.to_string()))
}

/// One named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn span(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    }
}

/// Renders a line chart with labeled axes and a legend.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 480.0);
    let (left, right, top, bottom) = (90.0, 190.0, 40.0, 60.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let (x0, x1) = span(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = span(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="black"/><text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
            top + ph,
            top + ph + 5.0,
            top + ph + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = top + 10.0 + 18.0 * i as f64;
        let lx = left + pw + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Series of one summary statistic against the swept value, one per (mode, scheme).
pub fn series_from_summary(
    rows: &[SummaryRow],
    stat: impl Fn(&SummaryRow) -> Option<f64>,
) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let name = format!("{} / {}", r.mode, r.scheme);
        let Some(y) = stat(r) else { continue };
        match out.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push((r.value, y)),
            None => out.push(Series {
                name,
                points: vec![(r.value, y)],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), SimError> {
    fs::write(path, bytes).map_err(|e| SimError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Writes `results.csv`, `summary.csv` and the EE and duration charts into `out_dir`.
pub fn emit_outputs(
    rows: &[ResultRow],
    summaries: &[SummaryRow],
    out_dir: &Path,
    format: OutputFormat,
    parameter: SweptParameter,
) -> Result<Vec<PathBuf>, SimError> {
    fs::create_dir_all(out_dir).map_err(|e| SimError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    let mut written = Vec::new();
    if format.csv() {
        let mut buf = Vec::new();
        write_results_csv(&mut buf, rows)?;
        let p = out_dir.join("results.csv");
        write_file(&p, &buf)?;
        written.push(p);
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, summaries)?;
        let p = out_dir.join("summary.csv");
        write_file(&p, &buf)?;
        written.push(p);
    }
    if format.svg() && !rows.is_empty() {
        let name = parameter.as_str().to_ascii_lowercase();
        let charts = [
            (
                format!("ee_vs_{name}.svg"),
                "Energy efficiency",
                "EE (bit/J)",
                series_from_summary(summaries, |s| s.mean_ee),
            ),
            (
                format!("t_star_vs_{name}.svg"),
                "Transmit duration",
                "t* (ms)",
                series_from_summary(summaries, |s| s.mean_t_star.map(|t| t * 1e3)),
            ),
        ];
        for (file, title, y_label, series) in charts {
            let p = out_dir.join(file);
            write_file(
                &p,
                line_chart(title, parameter.label(), y_label, &series).as_bytes(),
            )?;
            written.push(p);
        }
    }
    Ok(written)
}
