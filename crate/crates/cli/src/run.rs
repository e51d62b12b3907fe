use std::path::PathBuf;
use std::time::Instant;

use hebm_core::{BornProblem, LossTrace};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{Context, Result};
use crate::report::{DistributionStats, ExperimentReport, Timing};

/// Trains sample `k` of `config` on `problem`, attaching that sample's noise
/// history when the config has noise.
pub fn fit_sample(config: &ExperimentConfig, problem: &BornProblem, k: usize) -> Result<LossTrace> {
    let (optimizer, noise) = config.sample_settings(k);
    let ctx = || format!("experiment {:?}, sample {k}", config.name);
    match noise {
        None => problem.fit(&optimizer).context(ctx),
        Some(noise) => problem
            .clone()
            .with_noise(&noise)
            .context(ctx)?
            .fit(&optimizer)
            .context(ctx),
    }
}

/// Runs every sample in parallel and assembles the report without touching
/// the filesystem.
pub fn run_samples(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let problem = config.problem()?;
    let samples = (0..config.n_samples)
        .into_par_iter()
        .map(|k| fit_sample(config, &problem, k))
        .collect::<Result<Vec<_>>>()?;
    let total_seconds = start.elapsed().as_secs_f64();

    let best_sample = samples.iter().enumerate().fold(0, |best, (k, s)| {
        if s.final_loss() < samples[best].final_loss() {
            k
        } else {
            best
        }
    });
    let hamiltonian = problem
        .hamiltonian()
        .with_coefficients(&samples[best_sample].final_parameters)
        .context(|| format!("experiment {:?}", config.name))?
        .to_text();
    Ok(ExperimentReport {
        config: config.clone(),
        target: problem.target().clone(),
        final_distribution: DistributionStats::over(samples.iter().map(|s| &s.final_distribution)),
        half_distribution: DistributionStats::over(samples.iter().map(|s| &s.half_distribution)),
        best_sample,
        hamiltonian,
        timing: Timing {
            total_seconds,
            sample_seconds: samples.iter().map(|s| s.wall_time_seconds).collect(),
        },
        samples,
    })
}

/// Runs the experiment and writes its files under
/// `<output_dir>/<name>/`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentReport, PathBuf)> {
    let report = run_samples(config)?;
    let dir = report.write(&config.output_dir)?;
    Ok((report, dir))
}
