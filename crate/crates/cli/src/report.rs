use std::io::Write;
use std::path::{Path, PathBuf};

use hebm_core::{BitOrder, LossTrace, ProbabilityDistribution};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{io_error, ExperimentError, Result};

/// Per-state mean and population standard deviation over samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl DistributionStats {
    pub fn over<'a>(dists: impl ExactSizeIterator<Item = &'a ProbabilityDistribution> + Clone) -> Self {
        let n = dists.len() as f64;
        let dim = dists.clone().next().map_or(0, |d| d.len());
        let mut mean = vec![0.0; dim];
        for d in dists.clone() {
            mean.iter_mut().zip(d.probs()).for_each(|(m, p)| *m += p);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for d in dists {
            var.iter_mut()
                .zip(d.probs())
                .zip(&mean)
                .for_each(|((v, p), m)| *v += (p - m) * (p - m));
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub sample_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub target: ProbabilityDistribution,
    pub samples: Vec<LossTrace>,
    pub final_distribution: DistributionStats,
    pub half_distribution: DistributionStats,
    /// Sample with the lowest final loss, first on ties.
    pub best_sample: usize,
    /// Fitted Hamiltonian of the best sample.
    pub hamiltonian: String,
    pub timing: Timing,
}

impl ExperimentReport {
    pub fn best_final_loss(&self) -> f64 {
        self.samples[self.best_sample].final_loss()
    }

    pub fn final_losses(&self) -> Vec<f64> {
        self.samples.iter().map(LossTrace::final_loss).collect()
    }

    /// Copy with every wall-clock field zeroed; everything left is a pure
    /// function of the config.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.timing.total_seconds = 0.0;
        r.timing.sample_seconds.iter_mut().for_each(|t| *t = 0.0);
        r.samples.iter_mut().for_each(|s| s.wall_time_seconds = 0.0);
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        Self::from_json(&text).map_err(|e| ExperimentError::Parse {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    /// Writes the report files under `<root>/<name>/` and returns that
    /// directory.
    pub fn write(&self, root: &Path) -> Result<PathBuf> {
        let dir = root.join(&self.config.name);
        std::fs::create_dir_all(&dir).map_err(io_error(&dir))?;
        atomic_write(&dir.join("report.json"), self.to_json().as_bytes())?;
        for (k, s) in self.samples.iter().enumerate() {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["iteration", "loss"]).map_err(csv_error(&dir))?;
            for (i, loss) in s.losses.iter().enumerate() {
                w.serialize((i, loss)).map_err(csv_error(&dir))?;
            }
            atomic_write(&dir.join(format!("loss_trace_{k}.csv")), &finish(w, &dir)?)?;
        }
        atomic_write(
            &dir.join("distribution_mean_std.csv"),
            &self.distribution_csv(&dir)?,
        )?;
        atomic_write(&dir.join("hamiltonian.txt"), self.hamiltonian.as_bytes())?;
        Ok(dir)
    }

    fn distribution_csv(&self, dir: &Path) -> Result<Vec<u8>> {
        let n = self.config.n_qubits;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "state",
            "bits",
            "target",
            "final_mean",
            "final_std",
            "half_mean",
            "half_std",
        ])
        .map_err(csv_error(dir))?;
        for j in 0..self.target.len() {
            w.serialize((
                j,
                bit_string(j, n, self.config.bit_order),
                self.target.probs()[j],
                self.final_distribution.mean[j],
                self.final_distribution.std[j],
                self.half_distribution.mean[j],
                self.half_distribution.std[j],
            ))
            .map_err(csv_error(dir))?;
        }
        finish(w, dir)
    }
}

/// Qubit values of basis index `j`, qubit 0 first.
pub fn bit_string(j: usize, n_qubits: usize, order: BitOrder) -> String {
    (0..n_qubits)
        .map(|q| {
            let bit = match order {
                BitOrder::MsbFirst => n_qubits - 1 - q,
                BitOrder::LsbFirst => q,
            };
            if (j >> bit) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Writes through a temporary file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_error(dir))?;
    tmp.write_all(bytes).map_err(io_error(path))?;
    tmp.persist(path).map_err(|e| io_error(path)(e.error))?;
    Ok(())
}

pub(crate) fn csv_error(path: &Path) -> impl FnOnce(csv::Error) -> ExperimentError {
    let path = path.to_path_buf();
    move |e| ExperimentError::Parse {
        path,
        reason: e.to_string(),
    }
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>, path: &Path) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| ExperimentError::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_strings() {
        assert_eq!(bit_string(10, 4, BitOrder::MsbFirst), "1010");
        assert_eq!(bit_string(10, 4, BitOrder::LsbFirst), "0101");
        assert_eq!(bit_string(1, 3, BitOrder::MsbFirst), "001");
    }

    #[test]
    fn stats_use_the_population_deviation() {
        let a = ProbabilityDistribution::from_vec(vec![1.0, 0.0]).unwrap();
        let b = ProbabilityDistribution::from_vec(vec![0.5, 0.5]).unwrap();
        let s = DistributionStats::over([a.clone(), b].iter());
        assert_eq!(s.mean, vec![0.75, 0.25]);
        assert_eq!(s.std, vec![0.25, 0.25]);
        let single = DistributionStats::over([a].iter());
        assert_eq!(single.std, vec![0.0, 0.0]);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
