//! Hyperparameter sweeps.
//!
//! A grid file is an ordinary run config plus `sweep.<key> = v1, v2, ...`
//! axes and a `sweep.seeds` block. The sweep expands the cartesian product
//! (axes sorted by key, values in listed order), runs every point over the
//! sweep seeds, scores each by the environment's selection metric and picks
//! the argmax; ties go to the smaller step size, then the smaller
//! truncation. Sweep seeds must be disjoint from the evaluation seeds the
//! base config resolves to.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::config::{self, parse_seeds, RawConfig, RunConfig, Scale};
use crate::experiment::run_config;
use crate::plot::read_rows;
use crate::HarnessError;

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub base: RawConfig,
    /// (config key, values) sorted by key.
    pub axes: Vec<(String, Vec<String>)>,
    pub sweep_seeds: Vec<u64>,
}

pub fn parse_grid(text: &str) -> Result<SweepSpec, HarnessError> {
    let raw = config::parse(text)?;
    let mut base = RawConfig::default();
    let mut axes: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut sweep_seeds = None;
    for (key, value) in &raw.entries {
        if let Some(rest) = key.strip_prefix("sweep.") {
            if rest == "seeds" {
                sweep_seeds = Some(parse_seeds(value).map_err(|e| {
                    HarnessError::Unsupported(format!("sweep.seeds: {e}"))
                })?);
                continue;
            }
            let values: Vec<String> =
                value.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            if values.is_empty() {
                return Err(HarnessError::Unsupported(format!("sweep axis `{rest}` is empty")));
            }
            axes.insert(rest.to_string(), values);
        } else {
            base.entries.insert(key.clone(), value.clone());
        }
    }
    let sweep_seeds = sweep_seeds
        .ok_or_else(|| HarnessError::Unsupported("grid needs a sweep.seeds block".into()))?;
    for axis in axes.keys() {
        if base.entries.contains_key(axis) {
            return Err(HarnessError::Unsupported(format!(
                "`{axis}` appears both as a base key and a sweep axis"
            )));
        }
    }
    Ok(SweepSpec { base, axes: axes.into_iter().collect(), sweep_seeds })
}

/// One grid point: the resolved config plus the axis assignment that
/// produced it.
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub cfg: RunConfig,
    pub assignment: BTreeMap<String, String>,
}

pub fn expand(spec: &SweepSpec, scale: Scale) -> Result<Vec<GridPoint>, HarnessError> {
    // The base config's own seeds are the evaluation seeds; sweeping on
    // them would leak tuning into the reported curves.
    let eval_reference = config::resolve(&spec.base, scale)?;
    let clash: Vec<u64> = spec
        .sweep_seeds
        .iter()
        .copied()
        .filter(|s| eval_reference.seeds.contains(s))
        .collect();
    if !clash.is_empty() {
        return Err(HarnessError::Unsupported(format!(
            "sweep seeds {clash:?} overlap the evaluation seeds"
        )));
    }

    let mut points = vec![BTreeMap::new()];
    for (key, values) in &spec.axes {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for partial in &points {
            for value in values {
                let mut assignment: BTreeMap<String, String> = partial.clone();
                assignment.insert(key.clone(), value.clone());
                next.push(assignment);
            }
        }
        points = next;
    }

    let seed_list =
        spec.sweep_seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    points
        .into_iter()
        .map(|assignment| {
            let mut raw = spec.base.clone();
            for (k, v) in &assignment {
                raw.entries.insert(k.clone(), v.clone());
            }
            raw.entries.insert("seeds".to_string(), seed_list.clone());
            Ok(GridPoint { cfg: config::resolve(&raw, scale)?, assignment })
        })
        .collect()
}

/// The metric a sweep ranks by and the window it averages.
pub fn selection_metric(cfg: &RunConfig) -> &'static str {
    match cfg.env {
        config::EnvKind::Lobster => "segment_return",
        config::EnvKind::Compass | config::EnvKind::RockSample => "episode_return",
        config::EnvKind::Fishing1 | config::EnvKind::Fishing2 => "offline_return",
    }
}

/// Mean and standard error over per-seed window means. Online metrics
/// average the final 10% of training steps; offline (Fishing) averages the
/// last 100 evaluation points. Seeds with no surviving rows are dropped.
pub fn score_csv(cfg: &RunConfig, csv_path: &Path) -> Result<(f64, f64), HarnessError> {
    let rows = read_rows(csv_path)?;
    let metric = selection_metric(cfg);
    let offline = metric == "offline_return";
    let cutoff = cfg.steps - cfg.steps / 10;
    let mut per_seed: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for row in &rows {
        if row.metric == metric {
            per_seed.entry(row.seed).or_default().push(if offline {
                row.value
            } else if row.step > cutoff {
                row.value
            } else {
                continue;
            });
        }
    }
    let seed_means: Vec<f64> = per_seed
        .values()
        .filter(|vals| !vals.is_empty())
        .map(|vals| {
            let window: &[f64] = if offline && vals.len() > 100 {
                &vals[vals.len() - 100..]
            } else {
                vals
            };
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect();
    if seed_means.is_empty() {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    Ok(mean_se(&seed_means))
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub hash: String,
    pub tag: String,
    pub assignment: BTreeMap<String, String>,
    pub mean: f64,
    pub se: f64,
    pub alpha: f64,
    pub truncation: usize,
}

#[derive(Debug)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// Index into `entries` after ranking; entry 0 is the winner.
    pub best: RunConfig,
    pub report_path: PathBuf,
    pub selected_path: PathBuf,
}

pub fn run_sweep(spec: &SweepSpec, scale: Scale, out_dir: &Path) -> Result<SweepReport, HarnessError> {
    let points = expand(spec, scale)?;
    let axis_names: Vec<&String> = spec.axes.iter().map(|(k, _)| k).collect();
    let mut scored: Vec<(SweepEntry, RunConfig)> = Vec::with_capacity(points.len());
    for point in points {
        let out = run_config(&point.cfg, out_dir, false)?;
        let (mean, se) = score_csv(&point.cfg, &out.csv_path)?;
        scored.push((
            SweepEntry {
                hash: out.config_hash,
                tag: point.cfg.tag(),
                assignment: point.assignment,
                mean,
                se,
                alpha: point.cfg.learn.alpha,
                truncation: point.cfg.learn.truncation,
            },
            point.cfg,
        ));
    }
    if scored.iter().all(|(e, _)| e.mean == f64::NEG_INFINITY) {
        return Err(HarnessError::Unsupported(
            "every grid point failed; nothing to select".into(),
        ));
    }
    // Argmax of the score; ties prefer the smaller step size, then the
    // smaller truncation, so reports are reproducible.
    scored.sort_by(|(a, _), (b, _)| {
        b.mean
            .total_cmp(&a.mean)
            .then(a.alpha.total_cmp(&b.alpha))
            .then(a.truncation.cmp(&b.truncation))
    });

    let report_path = out_dir.join("sweep_report.csv");
    let mut text = String::from("rank,config_hash,tag");
    for name in &axis_names {
        text.push(',');
        text.push_str(name);
    }
    text.push_str(",score_mean,score_se,selected\n");
    for (i, (entry, _)) in scored.iter().enumerate() {
        text.push_str(&format!("{},{},{}", i + 1, entry.hash, entry.tag));
        for name in &axis_names {
            text.push(',');
            text.push_str(entry.assignment.get(*name).map(String::as_str).unwrap_or(""));
        }
        text.push_str(&format!(",{},{},{}\n", entry.mean, entry.se, (i == 0) as u8));
    }
    std::fs::write(&report_path, text)?;

    let best = scored[0].1.clone();
    let selected_path = out_dir.join("selected_config.txt");
    std::fs::write(&selected_path, best.canonical())?;
    Ok(SweepReport {
        entries: scored.into_iter().map(|(e, _)| e).collect(),
        best,
        report_path,
        selected_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expansion_is_a_sorted_cartesian_product() {
        let spec = parse_grid(
            "env = lobster\nagent = trace\nsteps = 1000\nseeds = 0,1\n\
             sweep.learn.alpha = 1e-3, 1e-4\nsweep.aux.lambda = 0.5, 0.9\n\
             sweep.seeds = 100,101\n",
        )
        .unwrap();
        let points = expand(&spec, Scale::Desk).unwrap();
        assert_eq!(points.len(), 4);
        // aux.lambda sorts before learn.alpha, so it is the outer axis.
        let lambdas: Vec<&str> =
            points.iter().map(|p| p.assignment["aux.lambda"].as_str()).collect();
        assert_eq!(lambdas, vec!["0.5", "0.5", "0.9", "0.9"]);
        for p in &points {
            assert_eq!(p.cfg.seeds, vec![100, 101], "grid points run on the sweep seeds");
        }
    }

    #[test]
    fn overlapping_sweep_and_eval_seeds_are_rejected() {
        let spec = parse_grid(
            "env = lobster\nagent = trace\nseeds = 0..5\nsweep.learn.alpha = 1e-3\n\
             sweep.seeds = 4,9\n",
        )
        .unwrap();
        assert!(matches!(expand(&spec, Scale::Desk), Err(HarnessError::Unsupported(_))));
    }

    #[test]
    fn base_key_cannot_also_be_an_axis() {
        let err = parse_grid(
            "env = lobster\nagent = trace\nlearn.alpha = 1e-3\n\
             sweep.learn.alpha = 1e-3, 1e-4\nsweep.seeds = 9\n",
        );
        assert!(matches!(err, Err(HarnessError::Unsupported(_))));
    }

    #[test]
    fn single_point_grid_selects_itself() {
        let dir = tempfile::tempdir().unwrap();
        let spec = parse_grid(
            "env = lobster\nagent = obs-only\nsteps = 1000\nseeds = 0\n\
             sweep.learn.alpha = 1e-3\nsweep.seeds = 50\n",
        )
        .unwrap();
        let report = run_sweep(&spec, Scale::Desk, dir.path()).unwrap();
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.best.learn.alpha, 1e-3);
        assert_eq!(report.best.seeds, vec![50]);
        let text = std::fs::read_to_string(&report.report_path).unwrap();
        assert!(text.lines().count() == 2);
        assert!(text.lines().nth(1).unwrap().ends_with(",1"));
    }

    #[test]
    fn a_dominant_point_wins_and_ties_prefer_small_alpha() {
        let a = SweepEntry {
            hash: "a".into(),
            tag: "a".into(),
            assignment: BTreeMap::new(),
            mean: 1.0,
            se: 0.0,
            alpha: 1e-3,
            truncation: 1,
        };
        let mut b = a.clone();
        b.hash = "b".into();
        b.alpha = 1e-4;
        let mut entries = vec![(a, ()), (b, ())];
        entries.sort_by(|(x, _), (y, _)| {
            y.mean
                .total_cmp(&x.mean)
                .then(x.alpha.total_cmp(&y.alpha))
                .then(x.truncation.cmp(&y.truncation))
        });
        assert_eq!(entries[0].0.hash, "b", "equal means tie-break to the smaller step size");
    }
}
