//! Exact statevector simulation of Trotterized Hamiltonian propagation.
//!
//! The propagator is `exp(-i H t / 2)` with the default `t = pi/2`,
//! split into `n_dt` time frames. Every term rotation is applied in closed
//! form, `exp(-i a P) = cos(a) - i sin(a) P`, which holds because Pauli
//! strings square to the identity.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distribution::ProbabilityDistribution;
use crate::error::{HebmError, Result};
use crate::hamiltonian::ParametricHamiltonian;
use crate::pauli::{BitOrder, PauliMask, PauliString};

/// Norm drift beyond which propagation reports an error instead of
/// silently renormalizing.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    bit_order: BitOrder,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes without normalization checks.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_qubits {
            return Err(HebmError::DimensionMismatch {
                expected: 1 << n_qubits,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            n_qubits,
            bit_order: BitOrder::default(),
            amplitudes,
        })
    }

    pub fn with_bit_order(mut self, order: BitOrder) -> Self {
        self.bit_order = order;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn bit_order(&self) -> BitOrder {
        self.bit_order
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_norm(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_DRIFT_TOLERANCE {
            return Err(HebmError::NormDrift {
                norm,
                tolerance: NORM_DRIFT_TOLERANCE,
            });
        }
        Ok(())
    }
}

pub fn prepare_basis_state(n_qubits: usize, index: usize) -> Result<StateVector> {
    let dim = 1usize << n_qubits;
    if index >= dim {
        return Err(HebmError::BasisIndexOutOfRange { index, n_qubits });
    }
    let mut amps = vec![Complex64::default(); dim];
    amps[index] = Complex64::new(1.0, 0.0);
    StateVector::from_amplitudes(n_qubits, amps)
}

pub fn prepare_equal_state(n_qubits: usize) -> StateVector {
    let dim = 1usize << n_qubits;
    let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    StateVector {
        n_qubits,
        bit_order: BitOrder::default(),
        amplitudes: vec![amp; dim],
    }
}

/// `exp(-i angle P)|psi>`.
pub fn apply_pauli_rotation(state: &StateVector, pauli: &PauliString, angle: f64) -> Result<StateVector> {
    if pauli.n_qubits() != state.n_qubits {
        return Err(HebmError::DimensionMismatch {
            expected: state.n_qubits,
            found: pauli.n_qubits(),
        });
    }
    let mut out = state.clone();
    pauli.mask(state.bit_order).rotate(&mut out.amplitudes, angle);
    Ok(out)
}

pub fn probabilities(state: &StateVector) -> Result<ProbabilityDistribution> {
    ProbabilityDistribution::new(
        state.n_qubits,
        state.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TrotterOrder {
    First,
    /// Symmetric (Strang) splitting: a half-angle forward sweep followed by
    /// a half-angle reverse sweep.
    Second,
}

impl TryFrom<u8> for TrotterOrder {
    type Error = HebmError;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(TrotterOrder::First),
            2 => Ok(TrotterOrder::Second),
            _ => Err(HebmError::InvalidConfig(format!(
                "Trotter order must be 1 or 2, got {v}"
            ))),
        }
    }
}

impl From<TrotterOrder> for u8 {
    fn from(o: TrotterOrder) -> u8 {
        match o {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrotterConfig {
    pub n_dt: usize,
    pub order: TrotterOrder,
    pub total_time: f64,
}

impl Default for TrotterConfig {
    fn default() -> Self {
        Self {
            n_dt: 13,
            order: TrotterOrder::Second,
            total_time: FRAC_PI_2,
        }
    }
}

impl TrotterConfig {
    pub fn new(n_dt: usize, order: TrotterOrder) -> Self {
        Self {
            n_dt,
            order,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_dt == 0 {
            return Err(HebmError::InvalidConfig("n_dt must be at least 1".into()));
        }
        if !self.total_time.is_finite() {
            return Err(HebmError::InvalidConfig("total_time must be finite".into()));
        }
        Ok(())
    }
}

/// One occurrence of a Hamiltonian term in the Trotter circuit; the applied
/// angle is `scale * theta[term]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub term: usize,
    pub scale: f64,
}

/// Addresses one rotation of a [`TrotterCircuit`] and adds `delta` to its
/// angle. Used by the parameter-shift gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleShift {
    pub frame: usize,
    pub index: usize,
    pub delta: f64,
}

/// The Trotterized propagator of a fixed Hamiltonian structure, compiled to
/// bit masks. Coefficients are supplied at application time.
#[derive(Debug, Clone)]
pub struct TrotterCircuit {
    n_qubits: usize,
    masks: Vec<PauliMask>,
    step: Vec<Rotation>,
    n_dt: usize,
}

impl TrotterCircuit {
    pub fn new(h: &ParametricHamiltonian, cfg: &TrotterConfig, bit_order: BitOrder) -> Result<Self> {
        cfg.validate()?;
        let masks = h.terms().iter().map(|t| t.pauli.mask(bit_order)).collect();
        // exp(-i H t / 2) over n_dt frames
        let frame_angle = cfg.total_time / (2.0 * cfg.n_dt as f64);
        let n = h.len();
        let step = match cfg.order {
            TrotterOrder::First => (0..n)
                .map(|term| Rotation {
                    term,
                    scale: frame_angle,
                })
                .collect(),
            TrotterOrder::Second => {
                let half = 0.5 * frame_angle;
                (0..n)
                    .chain((0..n).rev())
                    .map(|term| Rotation { term, scale: half })
                    .collect()
            }
        };
        Ok(Self {
            n_qubits: h.n_qubits(),
            masks,
            step,
            n_dt: cfg.n_dt,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_terms(&self) -> usize {
        self.masks.len()
    }

    pub fn n_frames(&self) -> usize {
        self.n_dt
    }

    pub fn masks(&self) -> &[PauliMask] {
        &self.masks
    }

    /// Rotations making up one time frame (identical for every frame).
    pub fn frame(&self) -> &[Rotation] {
        &self.step
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.masks.len() {
            return Err(HebmError::DimensionMismatch {
                expected: self.masks.len(),
                found: theta.len(),
            });
        }
        Ok(())
    }

    /// Applies the rotations of frame `frame` in place.
    pub fn apply_frame(
        &self,
        amps: &mut [Complex64],
        theta: &[f64],
        frame: usize,
        shift: Option<AngleShift>,
    ) {
        for (index, r) in self.step.iter().enumerate() {
            let mut angle = r.scale * theta[r.term];
            if let Some(s) = shift {
                if s.frame == frame && s.index == index {
                    angle += s.delta;
                }
            }
            self.masks[r.term].rotate(amps, angle);
        }
    }

    /// Applies the full propagator in place, without norm checks. Works on
    /// unnormalized vectors.
    pub fn apply(&self, amps: &mut [Complex64], theta: &[f64], shift: Option<AngleShift>) -> Result<()> {
        self.check_theta(theta)?;
        if amps.len() != 1usize << self.n_qubits {
            return Err(HebmError::DimensionMismatch {
                expected: 1 << self.n_qubits,
                found: amps.len(),
            });
        }
        for frame in 0..self.n_dt {
            self.apply_frame(amps, theta, frame, shift);
        }
        Ok(())
    }

    pub fn propagate(
        &self,
        state: &StateVector,
        theta: &[f64],
        shift: Option<AngleShift>,
    ) -> Result<StateVector> {
        let mut out = state.clone();
        self.apply(&mut out.amplitudes, theta, shift)?;
        out.check_norm()?;
        Ok(out)
    }
}

/// Propagates `state` by the Trotterized `exp(-i H t / 2)` using the
/// coefficients stored in `h`.
pub fn trotter_propagate(
    state: &StateVector,
    h: &ParametricHamiltonian,
    cfg: &TrotterConfig,
) -> Result<StateVector> {
    if h.n_qubits() != state.n_qubits {
        return Err(HebmError::DimensionMismatch {
            expected: state.n_qubits,
            found: h.n_qubits(),
        });
    }
    TrotterCircuit::new(h, cfg, state.bit_order)?.propagate(state, &h.coefficients(), None)
}
