//! Kernel matrices over basis indices and the MMD loss
//! `F = x K x + f K f - 2 f K x`.

use serde::{Deserialize, Serialize};

use crate::distribution::ProbabilityDistribution;
use crate::error::{HebmError, Result};

/// Kernel family selected in an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    /// Gaussian in the basis-integer distance `|i - j|`.
    GaussianInteger {
        bandwidths: Vec<f64>,
    },
    /// Gaussian in the Hamming distance between basis bit strings.
    GaussianHamming {
        bandwidths: Vec<f64>,
    },
    Identity,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::GaussianInteger {
            bandwidths: vec![0.25, 4.0],
        }
    }
}

impl KernelSpec {
    pub fn build(&self, n_qubits: usize) -> Result<KernelMatrix> {
        match self {
            KernelSpec::GaussianInteger { bandwidths } => gaussian_kernel(n_qubits, bandwidths),
            KernelSpec::GaussianHamming { bandwidths } => gaussian_hamming_kernel(n_qubits, bandwidths),
            KernelSpec::Identity => Ok(identity_kernel(n_qubits)),
        }
    }
}

/// Dense symmetric `2^N x 2^N` kernel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    dim: usize,
    entries: Vec<f64>,
    bandwidths: Vec<f64>,
}

impl KernelMatrix {
    fn from_fn(n_qubits: usize, bandwidths: Vec<f64>, f: impl Fn(usize, usize) -> f64) -> Self {
        let dim = 1usize << n_qubits;
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        Self {
            dim,
            entries,
            bandwidths,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// `K v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(k, x)| k * x).sum())
            .collect()
    }

    /// `u^T K v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter()
            .enumerate()
            .map(|(i, ui)| ui * self.row(i).iter().zip(v).map(|(k, x)| k * x).sum::<f64>())
            .sum()
    }
}

fn check_bandwidths(bandwidths: &[f64]) -> Result<()> {
    if bandwidths.is_empty() {
        return Err(HebmError::InvalidConfig(
            "kernel needs at least one bandwidth".into(),
        ));
    }
    if let Some(b) = bandwidths.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
        return Err(HebmError::InvalidConfig(format!("bandwidth {b} is not positive")));
    }
    Ok(())
}

fn gaussian_sum(d2: f64, bandwidths: &[f64]) -> f64 {
    bandwidths.iter().map(|c| (-d2 / (2.0 * c)).exp()).sum()
}

/// `K_ij = sum_c exp(-(i - j)^2 / (2c))`.
pub fn gaussian_kernel(n_qubits: usize, bandwidths: &[f64]) -> Result<KernelMatrix> {
    check_bandwidths(bandwidths)?;
    Ok(KernelMatrix::from_fn(n_qubits, bandwidths.to_vec(), |i, j| {
        let d = i as f64 - j as f64;
        gaussian_sum(d * d, bandwidths)
    }))
}

/// Same as [`gaussian_kernel`] with the Hamming distance in place of `|i - j|`.
pub fn gaussian_hamming_kernel(n_qubits: usize, bandwidths: &[f64]) -> Result<KernelMatrix> {
    check_bandwidths(bandwidths)?;
    Ok(KernelMatrix::from_fn(n_qubits, bandwidths.to_vec(), |i, j| {
        let d = (i ^ j).count_ones() as f64;
        gaussian_sum(d * d, bandwidths)
    }))
}

/// Reduces the MMD loss to the squared Euclidean distance.
pub fn identity_kernel(n_qubits: usize) -> KernelMatrix {
    KernelMatrix::from_fn(n_qubits, Vec::new(), |i, j| if i == j { 1.0 } else { 0.0 })
}

/// `(x - f)^T K (x - f)` on raw slices.
pub fn mmd_quadratic(x: &[f64], f: &[f64], kernel: &KernelMatrix) -> Result<f64> {
    if x.len() != kernel.dim() || f.len() != kernel.dim() {
        return Err(HebmError::DimensionMismatch {
            expected: kernel.dim(),
            found: if x.len() != kernel.dim() { x.len() } else { f.len() },
        });
    }
    let diff: Vec<f64> = x.iter().zip(f).map(|(a, b)| a - b).collect();
    Ok(kernel.bilinear(&diff, &diff))
}

pub fn mmd_loss(
    x: &ProbabilityDistribution,
    f: &ProbabilityDistribution,
    kernel: &KernelMatrix,
) -> Result<f64> {
    mmd_quadratic(x.probs(), f.probs(), kernel)
}
