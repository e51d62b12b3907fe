//! Target distributions (bars-and-stripes, Gaussian, Gibbs) and the KL
//! divergence.

use serde::{Deserialize, Serialize};

use crate::distribution::ProbabilityDistribution;
use crate::error::{HebmError, Result};

/// Uniform over bars-and-stripes images of a `rows x cols` grid. Qubit `q`
/// is pixel `(q / cols, q % cols)`, qubit 0 being the most significant bit.
pub fn bas_grid(rows: usize, cols: usize) -> Result<ProbabilityDistribution> {
    if rows == 0 || cols == 0 || rows * cols > 20 {
        return Err(HebmError::InvalidConfig(format!(
            "unsupported BAS grid {rows}x{cols}"
        )));
    }
    let n = rows * cols;
    let bit = |r: usize, c: usize| 1usize << (n - 1 - (r * cols + c));
    let mut support = Vec::new();
    // stripes: each row constant
    for mask in 0..(1usize << rows) {
        let mut idx = 0;
        for r in (0..rows).filter(|r| mask >> r & 1 == 1) {
            for c in 0..cols {
                idx |= bit(r, c);
            }
        }
        support.push(idx);
    }
    // bars: each column constant
    for mask in 0..(1usize << cols) {
        let mut idx = 0;
        for c in (0..cols).filter(|c| mask >> c & 1 == 1) {
            for r in 0..rows {
                idx |= bit(r, c);
            }
        }
        support.push(idx);
    }
    support.sort_unstable();
    support.dedup();
    let mut weights = vec![0.0; 1 << n];
    for i in support {
        weights[i] = 1.0;
    }
    ProbabilityDistribution::from_weights(n, weights)
}

/// Bars-and-stripes on the square grid with `n_qubits` pixels; for four
/// qubits this puts 1/6 on indices {0, 3, 5, 10, 12, 15}.
pub fn bas_distribution(n_qubits: usize) -> Result<ProbabilityDistribution> {
    let side = (n_qubits as f64).sqrt().round() as usize;
    if side < 2 || side * side != n_qubits {
        return Err(HebmError::InvalidConfig(format!(
            "bars-and-stripes needs a square grid, got {n_qubits} qubits"
        )));
    }
    bas_grid(side, side)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub n_qubits: usize,
    pub center: f64,
    pub sigma: f64,
}

/// `p_j ∝ exp(-(j - c)^2 / (2 sigma))`. The width enters unsquared.
pub fn gaussian_distribution(spec: &GaussianSpec) -> Result<ProbabilityDistribution> {
    if !(spec.sigma > 0.0) {
        return Err(HebmError::InvalidConfig(format!(
            "sigma must be positive, got {}",
            spec.sigma
        )));
    }
    let dim = 1usize << spec.n_qubits;
    let logs: Vec<f64> = (0..dim)
        .map(|j| {
            let d = j as f64 - spec.center;
            -d * d / (2.0 * spec.sigma)
        })
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ProbabilityDistribution::from_weights(spec.n_qubits, logs.iter().map(|l| (l - max).exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsSpec {
    pub n_qubits: usize,
    pub beta: f64,
}

/// Energy of basis state `b` under `H = -sum_j Z_j Z_{j+1}` on a ring,
/// with bit 0 giving spin +1.
pub fn ring_ising_energy(n_qubits: usize, b: usize) -> f64 {
    let spin = |q: usize| {
        if b >> (n_qubits - 1 - q) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    -(0..n_qubits)
        .map(|j| spin(j) * spin((j + 1) % n_qubits))
        .sum::<f64>()
}

pub fn gibbs_distribution(spec: &GibbsSpec) -> Result<ProbabilityDistribution> {
    if spec.n_qubits < 3 {
        return Err(HebmError::TooFewQubits {
            min: 3,
            found: spec.n_qubits,
        });
    }
    if !(spec.beta >= 0.0) || !spec.beta.is_finite() {
        return Err(HebmError::InvalidConfig(format!(
            "beta must be nonnegative, got {}",
            spec.beta
        )));
    }
    let dim = 1usize << spec.n_qubits;
    let energies: Vec<f64> = (0..dim).map(|b| ring_ising_energy(spec.n_qubits, b)).collect();
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    ProbabilityDistribution::from_weights(
        spec.n_qubits,
        energies
            .iter()
            .map(|e| (-spec.beta * (e - e_min)).exp())
            .collect(),
    )
}

/// `sum_j f_j ln(f_j / x_j)`, skipping `f_j = 0`. Returns `+inf` when `f`
/// has mass where `x` has none.
pub fn kl_divergence(f: &ProbabilityDistribution, x: &ProbabilityDistribution) -> Result<f64> {
    if f.len() != x.len() {
        return Err(HebmError::DimensionMismatch {
            expected: f.len(),
            found: x.len(),
        });
    }
    let mut total = 0.0;
    for (&fj, &xj) in f.probs().iter().zip(x.probs()) {
        if fj == 0.0 {
            continue;
        }
        if xj == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += fj * (fj / xj).ln();
    }
    Ok(total)
}
