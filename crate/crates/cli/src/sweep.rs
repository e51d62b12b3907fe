//! Parameter sweeps. Each writes one CSV under `<output_dir>/<name>/`.

use std::path::{Path, PathBuf};

use hebm_core::{kl_divergence, NoiseConfig, OptimizerConfig, ProbabilityDistribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, TargetSpec};
use crate::error::{io_error, Context, ExperimentError, Result};
use crate::report::{atomic_write, csv_error, finish};
use crate::run::{fit_sample, run_samples};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub n_dt: usize,
    /// Mean wall time of the samples that reached the threshold.
    pub seconds_to_threshold: Option<f64>,
    pub samples_reached: usize,
    pub best_loss: f64,
    /// No sample reached the threshold.
    pub flagged: bool,
}

/// Wall time until the loss drops below `threshold`, per `n_dt`. Samples
/// run one after another so their timings do not compete.
pub fn timing_sweep(
    config: &ExperimentConfig,
    n_dt_values: &[usize],
    threshold: f64,
) -> Result<Vec<TimingRow>> {
    n_dt_values
        .iter()
        .map(|&n_dt| {
            let mut cfg = config.clone();
            cfg.trotter.n_dt = n_dt;
            cfg.optimizer = OptimizerConfig {
                target_loss: Some(threshold),
                ..cfg.optimizer
            };
            cfg.validate()?;
            let problem = cfg.problem()?;
            let traces = (0..cfg.n_samples)
                .map(|k| fit_sample(&cfg, &problem, k))
                .collect::<Result<Vec<_>>>()?;
            let reached: Vec<f64> = traces
                .iter()
                .filter(|t| t.final_loss() < threshold)
                .map(|t| t.wall_time_seconds)
                .collect();
            Ok(TimingRow {
                n_dt,
                seconds_to_threshold: (!reached.is_empty())
                    .then(|| reached.iter().sum::<f64>() / reached.len() as f64),
                samples_reached: reached.len(),
                best_loss: traces
                    .iter()
                    .map(|t| t.final_loss())
                    .fold(f64::INFINITY, f64::min),
                flagged: reached.is_empty(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseCell {
    pub phase_variance_deg: f64,
    pub pole_variance_deg: f64,
    pub min_loss: f64,
    pub mean_loss: f64,
}

fn with_variances(config: &ExperimentConfig, phase: f64, pole: f64) -> ExperimentConfig {
    let mut cfg = config.clone();
    let base = cfg.noise.take().unwrap_or_default();
    cfg.noise = Some(NoiseConfig {
        phase_variance_deg: phase,
        pole_variance_deg: pole,
        ..base
    });
    cfg
}

/// Final loss over samples for every `(phase, pole)` pair, row-major in
/// `phase_vars`. Each cell runs `sweep.grid_samples` samples when set.
pub fn noise_sweep(
    config: &ExperimentConfig,
    phase_vars: &[f64],
    pole_vars: &[f64],
) -> Result<Vec<NoiseCell>> {
    let mut config = config.clone();
    if let Some(n) = config.sweep.as_ref().and_then(|s| s.grid_samples) {
        config.n_samples = n;
    }
    let config = &config;
    let grid: Vec<(f64, f64)> = phase_vars
        .iter()
        .flat_map(|&a| pole_vars.iter().map(move |&b| (a, b)))
        .collect();
    grid.into_par_iter()
        .map(|(phase, pole)| {
            let losses = run_samples(&with_variances(config, phase, pole))?.final_losses();
            Ok(NoiseCell {
                phase_variance_deg: phase,
                pole_variance_deg: pole,
                min_loss: losses.iter().cloned().fold(f64::INFINITY, f64::min),
                mean_loss: losses.iter().sum::<f64>() / losses.len() as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlRow {
    pub b: f64,
    /// `KL(target || uniform)`.
    pub kl: f64,
    /// Minimum final loss over samples, one entry per noise variance.
    pub min_losses: Vec<f64>,
}

/// For each width `b`, the Gaussian target of that width, its divergence
/// from the uniform distribution, and the best final loss at each noise
/// variance (applied to both kicks).
pub fn kl_sweep(config: &ExperimentConfig, b_values: &[f64], noise_vars: &[f64]) -> Result<Vec<KlRow>> {
    let TargetSpec::Gaussian { center, .. } = config.target else {
        return Err(ExperimentError::Config(
            "the KL sweep needs a Gaussian target".into(),
        ));
    };
    let at = |b: f64| {
        let mut cfg = config.clone();
        cfg.target = TargetSpec::Gaussian { center, sigma: b };
        cfg
    };
    let uniform = ProbabilityDistribution::uniform(config.n_qubits);
    let cells: Vec<(usize, usize)> = (0..b_values.len())
        .flat_map(|i| (0..noise_vars.len()).map(move |j| (i, j)))
        .collect();
    let losses = cells
        .into_par_iter()
        .map(|(i, j)| {
            let v = noise_vars[j];
            let report = run_samples(&with_variances(&at(b_values[i]), v, v))?;
            Ok(report.best_final_loss())
        })
        .collect::<Result<Vec<f64>>>()?;
    b_values
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let target = at(b).target.build(config.n_qubits)?;
            Ok(KlRow {
                b,
                kl: kl_divergence(&target, &uniform).context(|| format!("KL at b = {b}"))?,
                min_losses: losses[i * noise_vars.len()..(i + 1) * noise_vars.len()].to_vec(),
            })
        })
        .collect()
}

fn sweep_dir(config: &ExperimentConfig) -> Result<PathBuf> {
    let dir = config.output_dir.join(&config.name);
    std::fs::create_dir_all(&dir).map_err(io_error(&dir))?;
    Ok(dir)
}

fn write_rows<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error(path))?;
    }
    atomic_write(path, &finish(w, path)?)
}

pub fn write_timing_csv(config: &ExperimentConfig, rows: &[TimingRow]) -> Result<PathBuf> {
    let path = sweep_dir(config)?.join("timing.csv");
    write_rows(&path, rows)?;
    Ok(path)
}

pub fn write_noise_csv(config: &ExperimentConfig, cells: &[NoiseCell]) -> Result<PathBuf> {
    let path = sweep_dir(config)?.join("noise_grid.csv");
    write_rows(&path, cells)?;
    Ok(path)
}

/// Columns `b, kl, log10_min_loss_<v>` for each noise variance `v`.
pub fn write_kl_csv(config: &ExperimentConfig, noise_vars: &[f64], rows: &[KlRow]) -> Result<PathBuf> {
    let path = sweep_dir(config)?.join("kl_sweep.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["b".to_string(), "kl".to_string()];
    header.extend(noise_vars.iter().map(|v| format!("log10_min_loss_{v}")));
    w.write_record(&header).map_err(csv_error(&path))?;
    for r in rows {
        let mut record = vec![r.b.to_string(), r.kl.to_string()];
        record.extend(r.min_losses.iter().map(|l| l.log10().to_string()));
        w.write_record(&record).map_err(csv_error(&path))?;
    }
    atomic_write(&path, &finish(w, &path)?)?;
    Ok(path)
}
