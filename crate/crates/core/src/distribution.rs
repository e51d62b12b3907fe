use serde::{Deserialize, Serialize};

use crate::error::{HebmError, Result};

/// Sum tolerance accepted when validating a distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Probabilities over the `2^N` computational basis states, indexed by the
/// basis integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct ProbabilityDistribution {
    n_qubits: usize,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    n_qubits: usize,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for ProbabilityDistribution {
    type Error = HebmError;
    fn try_from(raw: RawDistribution) -> Result<Self> {
        Self::new(raw.n_qubits, raw.probs)
    }
}

impl From<ProbabilityDistribution> for RawDistribution {
    fn from(d: ProbabilityDistribution) -> Self {
        RawDistribution {
            n_qubits: d.n_qubits,
            probs: d.probs,
        }
    }
}

impl ProbabilityDistribution {
    pub fn new(n_qubits: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << n_qubits {
            return Err(HebmError::DimensionMismatch {
                expected: 1 << n_qubits,
                found: probs.len(),
            });
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= 0.0) || !p.is_finite())
        {
            return Err(HebmError::InvalidDistribution(format!("entry {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(HebmError::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { n_qubits, probs })
    }

    /// Infers `n_qubits` from the length, which must be a power of two.
    pub fn from_vec(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(HebmError::InvalidDistribution(format!(
                "length {len} is not a power of two"
            )));
        }
        Self::new(len.trailing_zeros() as usize, probs)
    }

    /// Normalizes nonnegative weights to sum to one.
    pub fn from_weights(n_qubits: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(HebmError::InvalidDistribution(format!("weights sum to {total}")));
        }
        Self::new(n_qubits, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            probs: vec![1.0 / dim as f64; dim],
        }
    }

    /// Point mass on one basis index.
    pub fn point(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(HebmError::BasisIndexOutOfRange { index, n_qubits });
        }
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        Ok(Self { n_qubits, probs })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    /// Half the L1 distance.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(HebmError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}
