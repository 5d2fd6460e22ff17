//! Learning-curve plots.
//!
//! Reads run CSVs, aggregates one curve per input file (mean over seeds
//! with a ±1 standard error band) and writes an SVG. Output bytes are a
//! pure function of the inputs: fixed canvas, fixed palette, fixed number
//! formatting, no timestamps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::HarnessError;

pub const CSV_HEADER: &str = "config_hash,seed,step,metric,value";

#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub hash: String,
    pub seed: u64,
    pub step: u64,
    pub metric: String,
    pub value: f64,
}

fn csv_err(path: &Path, message: impl Into<String>) -> HarnessError {
    HarnessError::Csv { path: path.display().to_string(), message: message.into() }
}

pub fn read_rows(path: &Path) -> Result<Vec<CsvRow>, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => return Err(csv_err(path, format!("unexpected header `{h}`"))),
        None => return Err(csv_err(path, "empty file")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(csv_err(path, format!("line {}: expected 5 fields", i + 2)));
        }
        let parse = |what: &str, e: std::num::ParseIntError| {
            csv_err(path, format!("line {}: bad {what}: {e}", i + 2))
        };
        rows.push(CsvRow {
            hash: fields[0].to_string(),
            seed: fields[1].parse().map_err(|e| parse("seed", e))?,
            step: fields[2].parse().map_err(|e| parse("step", e))?,
            metric: fields[3].to_string(),
            value: fields[4]
                .parse()
                .map_err(|e| csv_err(path, format!("line {}: bad value: {e}", i + 2)))?,
        });
    }
    Ok(rows)
}

/// Serialize rows in the exact on-disk format the runner emits. `f64`'s
/// shortest display form round-trips, so read + write is lossless.
pub fn write_rows(rows: &[CsvRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.hash, r.seed, r.step, r.metric, r.value);
    }
    out
}

struct Curve {
    label: String,
    /// (step, mean, se) on the shared grid.
    points: Vec<(u64, f64, f64)>,
}

#[derive(Debug)]
pub struct PlotSummary {
    pub metric: String,
    pub curves: usize,
    pub grid_points: usize,
}

/// Per-seed series for one file, restricted to `metric`, seeds that logged
/// a `failed` row dropped with a warning.
fn seed_series(
    path: &Path,
    rows: &[CsvRow],
    metric: &str,
) -> Result<BTreeMap<u64, Vec<(u64, f64)>>, HarnessError> {
    let mut failed: Vec<u64> = rows
        .iter()
        .filter(|r| r.metric == "failed")
        .map(|r| r.seed)
        .collect();
    failed.sort_unstable();
    failed.dedup();
    if !failed.is_empty() {
        eprintln!(
            "warning: {}: dropping failed seeds {:?}",
            path.display(),
            failed
        );
    }
    let mut series: BTreeMap<u64, Vec<(u64, f64)>> = BTreeMap::new();
    for r in rows {
        if r.metric == metric && !failed.contains(&r.seed) {
            series.entry(r.seed).or_default().push((r.step, r.value));
        }
    }
    series.retain(|_, s| !s.is_empty());
    if series.is_empty() {
        return Err(csv_err(path, format!("no usable `{metric}` rows")));
    }
    for s in series.values_mut() {
        s.sort_by_key(|&(step, _)| step);
    }
    Ok(series)
}

/// Step-function resample: value at grid point x is the last sample at
/// step <= x, or the first sample when x precedes the series.
fn resample(series: &[(u64, f64)], grid: &[u64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut i = 0usize;
    for &x in grid {
        while i + 1 < series.len() && series[i + 1].0 <= x {
            i += 1;
        }
        out.push(if series[i].0 <= x || i == 0 { series[i].1 } else { series[0].1 });
    }
    out
}

fn label_for(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| {
        path.display().to_string()
    })
}

pub fn render(
    inputs: &[PathBuf],
    out: &Path,
    metric: Option<&str>,
) -> Result<PlotSummary, HarnessError> {
    if inputs.is_empty() {
        return Err(HarnessError::Unsupported("plot needs at least one input CSV".into()));
    }
    let mut files = Vec::with_capacity(inputs.len());
    for path in inputs {
        files.push((path.clone(), read_rows(path)?));
    }

    let metric = match metric {
        Some(m) => m.to_string(),
        None => {
            // Most frequent metric across all inputs; ties alphabetical.
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for (_, rows) in &files {
                for r in rows {
                    if r.metric != "failed" {
                        *counts.entry(r.metric.as_str()).or_default() += 1;
                    }
                }
            }
            counts
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
                .map(|(m, _)| m.to_string())
                .ok_or_else(|| HarnessError::Unsupported("inputs contain no metrics".into()))?
        }
    };

    let mut per_file = Vec::with_capacity(files.len());
    for (path, rows) in &files {
        let series = seed_series(path, rows, &metric)?;
        let mut grid: Vec<u64> = series.values().flatten().map(|&(s, _)| s).collect();
        grid.sort_unstable();
        grid.dedup();
        per_file.push((path.clone(), series, grid));
    }

    // Mismatched x-grids across files are resampled onto the coarsest one.
    let grid = per_file
        .iter()
        .map(|(_, _, g)| g)
        .min_by_key(|g| g.len())
        .cloned()
        .expect("at least one input");
    for (path, _, g) in &per_file {
        if *g != grid {
            eprintln!(
                "warning: {}: x-grid differs; resampling onto the coarsest grid ({} points)",
                path.display(),
                grid.len()
            );
        }
    }

    let mut curves = Vec::with_capacity(per_file.len());
    for (path, series, _) in &per_file {
        let resampled: Vec<Vec<f64>> =
            series.values().map(|s| resample(s, &grid)).collect();
        let points = grid
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let at: Vec<f64> = resampled.iter().map(|r| r[i]).collect();
                let (mean, se) = crate::sweep::mean_se(&at);
                (x, mean, se)
            })
            .collect();
        curves.push(Curve { label: label_for(path), points });
    }

    let svg = draw(&curves, &metric);
    std::fs::write(out, svg)?;
    Ok(PlotSummary { metric, curves: curves.len(), grid_points: grid.len() })
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn fmt(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e12 {
        format!("{:.0}", v)
    } else {
        format!("{:.2}", v)
    }
}

fn draw(curves: &[Curve], metric: &str) -> String {
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for &(x, mean, se) in &c.points {
            x_min = x_min.min(x as f64);
            x_max = x_max.max(x as f64);
            y_min = y_min.min(mean - se);
            y_max = y_max.max(mean + se);
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if !y_min.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if y_max == y_min {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = (y_max - y_min) * 0.05;
    y_min -= pad;
    y_max += pad;

    let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>");

    // Axes and ticks.
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    );
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        HEIGHT - MARGIN_B
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x_min + t * (x_max - x_min);
        let yv = y_min + t * (y_max - y_min);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            px(xv),
            HEIGHT - MARGIN_B,
            px(xv),
            HEIGHT - MARGIN_B + 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            px(xv),
            HEIGHT - MARGIN_B + 20.0,
            fmt(xv)
        );
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            MARGIN_L - 5.0,
            py(yv),
            MARGIN_L,
            py(yv)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            MARGIN_L - 8.0,
            py(yv) + 4.0,
            fmt(yv)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">step</text>",
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 {:.2})\">{}</text>",
        15.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        metric
    );

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        // SE band: upper edge forward, lower edge back.
        let mut band = String::new();
        for &(x, m, se) in &c.points {
            let _ = write!(band, "{:.2},{:.2} ", px(x as f64), py(m + se));
        }
        for &(x, m, se) in c.points.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", px(x as f64), py(m - se));
        }
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>",
            band.trim_end(),
            color
        );
        let mut line = String::new();
        for &(x, m, _) in &c.points {
            let _ = write!(line, "{:.2},{:.2} ", px(x as f64), py(m));
        }
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            line.trim_end(),
            color
        );
        if c.points.len() <= 50 {
            for &(x, m, _) in &c.points {
                let _ = writeln!(
                    s,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{}\"/>",
                    px(x as f64),
                    py(m),
                    color
                );
            }
        }
        let ly = MARGIN_T + 6.0 + i as f64 * 16.0;
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"2\"/>",
            MARGIN_L + 10.0,
            ly,
            MARGIN_L + 34.0,
            ly,
            color
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>",
            MARGIN_L + 40.0,
            ly + 4.0,
            c.label
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for seed in 0..3u64 {
            for (i, step) in [100u64, 200, 300].iter().enumerate() {
                rows.push(CsvRow {
                    hash: "abcd".into(),
                    seed,
                    step: *step,
                    metric: "segment_return".into(),
                    value: seed as f64 + i as f64 * 0.5,
                });
            }
        }
        rows
    }

    #[test]
    fn csv_round_trips_losslessly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        let rows = sample_rows();
        std::fs::write(&path, write_rows(&rows)).unwrap();
        let back = read_rows(&path).unwrap();
        assert_eq!(back, rows);
        assert_eq!(write_rows(&back), write_rows(&rows));
    }

    #[test]
    fn bad_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "step,value\n1,2\n").unwrap();
        assert!(matches!(read_rows(&path), Err(HarnessError::Csv { .. })));
    }

    #[test]
    fn resample_holds_last_value() {
        let series = vec![(10u64, 1.0), (30, 2.0)];
        assert_eq!(resample(&series, &[5, 10, 20, 30, 40]), vec![1.0, 1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn render_is_deterministic_and_valid_svg() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        std::fs::write(&path, write_rows(&sample_rows())).unwrap();
        let out1 = dir.path().join("a.svg");
        let out2 = dir.path().join("b.svg");
        let s1 = render(&[path.clone()], &out1, None).unwrap();
        let s2 = render(&[path.clone()], &out2, None).unwrap();
        assert_eq!(s1.metric, "segment_return");
        assert_eq!(s2.grid_points, s1.grid_points);
        assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
        let text = std::fs::read_to_string(&out1).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("polyline"));
        assert!(text.ends_with("</svg>\n"));
    }

    #[test]
    fn mismatched_grids_resample_to_the_coarsest() {
        let dir = tempfile::tempdir().unwrap();
        let fine = dir.path().join("fine.csv");
        let coarse = dir.path().join("coarse.csv");
        let mut fine_rows = Vec::new();
        for step in (100..=1000).step_by(100) {
            fine_rows.push(CsvRow {
                hash: "f".into(),
                seed: 0,
                step,
                metric: "m".into(),
                value: step as f64,
            });
        }
        let coarse_rows: Vec<CsvRow> = [500u64, 1000]
            .iter()
            .map(|&step| CsvRow {
                hash: "c".into(),
                seed: 0,
                step,
                metric: "m".into(),
                value: 1.0,
            })
            .collect();
        std::fs::write(&fine, write_rows(&fine_rows)).unwrap();
        std::fs::write(&coarse, write_rows(&coarse_rows)).unwrap();
        let out = dir.path().join("both.svg");
        let summary = render(&[fine, coarse], &out, Some("m")).unwrap();
        assert_eq!(summary.grid_points, 2, "coarsest grid wins");
        assert_eq!(summary.curves, 2);
    }

    #[test]
    fn failed_seeds_are_excluded() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        let mut rows = sample_rows();
        rows.push(CsvRow {
            hash: "abcd".into(),
            seed: 1,
            step: 150,
            metric: "failed".into(),
            value: 1.0,
        });
        std::fs::write(&path, write_rows(&rows)).unwrap();
        let series = seed_series(&path, &read_rows(&path).unwrap(), "segment_return").unwrap();
        assert!(!series.contains_key(&1));
        assert_eq!(series.len(), 2);
    }
}
