//! Density-matrix propagation under per-qubit dephasing ("phase kick") and
//! amplitude relaxation ("pole kick").
//!
//! Each time frame applies half of that frame's dissipative channel, the
//! unitary Trotter frame, then the other half. The dissipator is the
//! trace-preserving `D[L] rho = 2 L rho L^+ - {L^+ L, rho}` with
//!
//! * phase kick `L = sqrt(gamma1)/2 Z`, so coherences decay as `exp(-gamma1 t)`;
//! * pole kick `L = sqrt(gamma2/8) (X -+ iY)`, so the population leaves the
//!   opposite pole as `exp(-gamma2 t)`.
//!
//! Jump rates come from kick angles: `gamma1 = -ln(2cos^2 theta1 - 1)/tau0`
//! and `gamma2 = -ln(cos^2 theta2)/tau0`. Over one noise period `tau0` a pole
//! kick of angle `theta2` thus keeps a fraction `cos^2 theta2` of the
//! relaxing population.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HebmError, Result};
use crate::hamiltonian::ParametricHamiltonian;
use crate::pauli::BitOrder;
use crate::statevector::{AngleShift, StateVector, TrotterCircuit, TrotterConfig, TrotterOrder};

/// Phase-kick angles are clamped to this magnitude (degrees) so the jump
/// rate stays finite.
pub const PHASE_ANGLE_LIMIT_DEG: f64 = 44.999;

const TRACE_TOLERANCE: f64 = 1e-9;
const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Pole the amplitude-relaxation channel drives toward.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpDirection {
    /// `L ∝ X + iY = 2|0><1|`.
    TowardZero,
    /// `L ∝ X - iY = 2|1><0|`.
    #[default]
    TowardOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub phase_variance_deg: f64,
    pub pole_variance_deg: f64,
    /// Noise period; `None` means `1 / n_dt` (natural units).
    pub tau0: Option<f64>,
    pub rng_seed: u64,
    pub jump_direction: JumpDirection,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            phase_variance_deg: 0.0,
            pole_variance_deg: 0.0,
            tau0: None,
            rng_seed: 0,
            jump_direction: JumpDirection::TowardOne,
        }
    }
}

impl NoiseConfig {
    pub fn with_variances(phase_deg: f64, pole_deg: f64) -> Self {
        Self {
            phase_variance_deg: phase_deg,
            pole_variance_deg: pole_deg,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=45.0).contains(&self.phase_variance_deg) {
            return Err(HebmError::InvalidConfig(format!(
                "phase variance {} deg outside [0, 45]",
                self.phase_variance_deg
            )));
        }
        if !(0.0..=45.0).contains(&self.pole_variance_deg) {
            return Err(HebmError::InvalidConfig(format!(
                "pole variance {} deg outside [0, 45]",
                self.pole_variance_deg
            )));
        }
        if let Some(t) = self.tau0 {
            if !(t > 0.0) || !t.is_finite() {
                return Err(HebmError::InvalidConfig(format!(
                    "tau0 must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn tau0_for(&self, n_dt: usize) -> f64 {
        self.tau0.unwrap_or(1.0 / n_dt as f64)
    }

    pub fn is_noiseless(&self) -> bool {
        self.phase_variance_deg == 0.0 && self.pole_variance_deg == 0.0
    }
}

/// `(gamma1, gamma2)` for kick angles given in degrees.
pub fn jump_rates(theta1_deg: f64, theta2_deg: f64, tau0: f64) -> Result<(f64, f64)> {
    if !(tau0 > 0.0) {
        return Err(HebmError::InvalidConfig(format!(
            "tau0 must be positive, got {tau0}"
        )));
    }
    if !(theta1_deg.abs() < 45.0) {
        return Err(HebmError::NoiseAngleOutOfRange {
            angle_deg: theta1_deg,
            limit_deg: 45.0,
        });
    }
    if !(theta2_deg.abs() < 90.0) {
        return Err(HebmError::NoiseAngleOutOfRange {
            angle_deg: theta2_deg,
            limit_deg: 90.0,
        });
    }
    let c1 = theta1_deg.to_radians().cos();
    let c2 = theta2_deg.to_radians().cos();
    // max(0) absorbs -0.0 and rounding just above 1
    let gamma1 = (-(2.0 * c1 * c1 - 1.0).ln() / tau0).max(0.0);
    let gamma2 = (-(c2 * c2).ln() / tau0).max(0.0);
    Ok((gamma1, gamma2))
}

/// Draws `count` independent `(theta1, theta2)` pairs in degrees, each
/// uniform on `[-v, v]` for its variance `v`. Phase angles are clamped to
/// `±44.999`.
pub fn sample_noise_angles(cfg: &NoiseConfig, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut draw = |v: f64| {
        let u: f64 = rng.random_range(-1.0..=1.0);
        if v == 0.0 {
            0.0
        } else {
            u * v
        }
    };
    (0..count)
        .map(|_| {
            let t1 = draw(cfg.phase_variance_deg).clamp(-PHASE_ANGLE_LIMIT_DEG, PHASE_ANGLE_LIMIT_DEG);
            let t2 = draw(cfg.pole_variance_deg);
            (t1, t2)
        })
        .collect()
}

/// Exact solution of the combined single-qubit dissipator over a fixed
/// duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitChannel {
    /// Fraction of the relaxing population that stays put.
    pub population_keep: f64,
    /// Multiplier on the off-diagonal elements.
    pub coherence_keep: f64,
    pub direction: JumpDirection,
}

impl SingleQubitChannel {
    pub const IDENTITY: Self = Self {
        population_keep: 1.0,
        coherence_keep: 1.0,
        direction: JumpDirection::TowardOne,
    };

    /// Action on a 2x2 block `[[m00, m01], [m10, m11]]`.
    #[inline]
    pub fn apply_block(&self, m: [Complex64; 4]) -> [Complex64; 4] {
        let [m00, m01, m10, m11] = m;
        let lam = self.population_keep;
        let mu = self.coherence_keep;
        match self.direction {
            JumpDirection::TowardOne => [m00 * lam, m01 * mu, m10 * mu, m11 + m00 * (1.0 - lam)],
            JumpDirection::TowardZero => [m00 + m11 * (1.0 - lam), m01 * mu, m10 * mu, m11 * lam],
        }
    }

    /// The channel as a 4x4 matrix on `(rho00, rho01, rho10, rho11)`.
    pub fn superoperator(&self) -> [[Complex64; 4]; 4] {
        let mut out = [[Complex64::default(); 4]; 4];
        for col in 0..4 {
            let mut e = [Complex64::default(); 4];
            e[col] = Complex64::new(1.0, 0.0);
            let image = self.apply_block(e);
            for row in 0..4 {
                out[row][col] = image[row];
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.population_keep == 1.0 && self.coherence_keep == 1.0
    }
}

/// `exp(dt (D[L_phase] + D[L_pole]))` for the given rates.
pub fn single_qubit_channel(
    gamma1: f64,
    gamma2: f64,
    dt: f64,
    direction: JumpDirection,
) -> Result<SingleQubitChannel> {
    if gamma1 < 0.0 {
        return Err(HebmError::NegativeRate(gamma1));
    }
    if gamma2 < 0.0 {
        return Err(HebmError::NegativeRate(gamma2));
    }
    if !(dt > 0.0) {
        return Err(HebmError::InvalidConfig(format!(
            "channel duration must be positive, got {dt}"
        )));
    }
    Ok(SingleQubitChannel {
        population_keep: (-gamma2 * dt).exp(),
        coherence_keep: (-(gamma1 + 0.5 * gamma2) * dt).exp(),
        direction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    n_qubits: usize,
    bit_order: BitOrder,
    /// Row-major; entry `(r, c)` sits at `(r << n_qubits) | c`.
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let entries = amps
            .iter()
            .flat_map(|a| amps.iter().map(move |b| a * b.conj()))
            .collect();
        Self {
            n_qubits: state.n_qubits(),
            bit_order: state.bit_order(),
            entries,
        }
    }

    pub fn from_entries(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(HebmError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            n_qubits,
            bit_order: BitOrder::default(),
            entries,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn bit_order(&self) -> BitOrder {
        self.bit_order
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[(r << self.n_qubits) | c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    /// `max |rho - rho^+|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part, by full diagonalization.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| 0.5 * (self.get(r, c) + self.get(c, r).conj()));
        m.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Trace and Hermiticity checks.
    pub fn check_invariants(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(HebmError::DensityInvariant(format!("trace is {tr}")));
        }
        let h = self.hermiticity_error();
        if h > HERMITIAN_TOLERANCE {
            return Err(HebmError::DensityInvariant(format!("hermiticity error {h}")));
        }
        Ok(())
    }

    /// Diagonal as a probability vector; rounding-level negatives are clipped.
    pub fn probabilities(&self) -> Result<crate::ProbabilityDistribution> {
        let diag = self.diagonal();
        if let Some(p) = diag.iter().find(|p| **p < -1e-9) {
            return Err(HebmError::DensityInvariant(format!("negative population {p}")));
        }
        crate::ProbabilityDistribution::new(self.n_qubits, diag.into_iter().map(|p| p.max(0.0)).collect())
    }

    /// `rho -> exp(-i a P) rho exp(i a P)` for the term `mask`.
    fn rotate(&mut self, mask: crate::pauli::PauliMask, angle: f64) {
        mask.shifted(self.n_qubits as u32)
            .rotate(&mut self.entries, angle);
        mask.conjugated().rotate(&mut self.entries, -angle);
    }

    /// Applies `channel` to the qubit stored at bit position `bit`.
    pub fn apply_channel_at_bit(&mut self, channel: &SingleQubitChannel, bit: usize) {
        if channel.is_identity() {
            return;
        }
        let col = 1usize << bit;
        let row = col << self.n_qubits;
        for idx in 0..self.entries.len() {
            if idx & (row | col) != 0 {
                continue;
            }
            let ids = [idx, idx | col, idx | row, idx | row | col];
            let out = channel.apply_block(ids.map(|i| self.entries[i]));
            for (i, v) in ids.into_iter().zip(out) {
                self.entries[i] = v;
            }
        }
    }

    pub fn apply_channel(&mut self, channel: &SingleQubitChannel, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(HebmError::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let bit = self.bit_order.bit_position(qubit, self.n_qubits);
        self.apply_channel_at_bit(channel, bit);
        Ok(())
    }
}

/// One sampled noise history: the half-frame channel for every frame and
/// qubit, plus the angles and rates that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRealization {
    pub frames: Vec<Vec<FrameNoise>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameNoise {
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Applied before and after the unitary frame; two halves make one
    /// noise period.
    pub half_channel: SingleQubitChannel,
}

impl NoiseRealization {
    /// Samples angles for `n_frames x n_qubits` slots (frame-major).
    pub fn sample(cfg: &NoiseConfig, n_qubits: usize, n_frames: usize) -> Result<Self> {
        cfg.validate()?;
        let tau0 = cfg.tau0_for(n_frames);
        let angles = sample_noise_angles(cfg, n_frames * n_qubits);
        let frames = angles
            .chunks(n_qubits)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&(t1, t2)| {
                        let (g1, g2) = jump_rates(t1, t2, tau0)?;
                        Ok(FrameNoise {
                            theta1_deg: t1,
                            theta2_deg: t2,
                            gamma1: g1,
                            gamma2: g2,
                            half_channel: single_qubit_channel(g1, g2, 0.5 * tau0, cfg.jump_direction)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { frames })
    }

    /// Constant rates on every qubit and frame, each frame lasting `dt`.
    pub fn constant(
        n_qubits: usize,
        n_frames: usize,
        gamma1: f64,
        gamma2: f64,
        dt: f64,
        direction: JumpDirection,
    ) -> Result<Self> {
        let half_channel = single_qubit_channel(gamma1, gamma2, 0.5 * dt, direction)?;
        let slot = FrameNoise {
            theta1_deg: f64::NAN,
            theta2_deg: f64::NAN,
            gamma1,
            gamma2,
            half_channel,
        };
        Ok(Self {
            frames: vec![vec![slot; n_qubits]; n_frames],
        })
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    fn apply_half(&self, rho: &mut DensityMatrix, frame: usize) {
        let n = rho.n_qubits;
        for (q, slot) in self.frames[frame].iter().enumerate() {
            let bit = rho.bit_order.bit_position(q, n);
            rho.apply_channel_at_bit(&slot.half_channel, bit);
        }
    }
}

/// Runs `circuit` on `rho` with the dissipative half-channels of `noise`
/// wrapped around every frame. No invariant checks.
pub fn propagate_density(
    circuit: &TrotterCircuit,
    noise: &NoiseRealization,
    rho: &mut DensityMatrix,
    theta: &[f64],
    shift: Option<AngleShift>,
) -> Result<()> {
    if theta.len() != circuit.n_terms() {
        return Err(HebmError::DimensionMismatch {
            expected: circuit.n_terms(),
            found: theta.len(),
        });
    }
    if rho.n_qubits != circuit.n_qubits() {
        return Err(HebmError::DimensionMismatch {
            expected: circuit.n_qubits(),
            found: rho.n_qubits,
        });
    }
    if noise.n_frames() != circuit.n_frames() || noise.frames.iter().any(|f| f.len() != rho.n_qubits) {
        return Err(HebmError::DimensionMismatch {
            expected: circuit.n_frames(),
            found: noise.n_frames(),
        });
    }
    let masks = circuit.masks();
    for frame in 0..circuit.n_frames() {
        noise.apply_half(rho, frame);
        for (index, r) in circuit.frame().iter().enumerate() {
            let mut angle = r.scale * theta[r.term];
            if let Some(s) = shift {
                if s.frame == frame && s.index == index {
                    angle += s.delta;
                }
            }
            rho.rotate(masks[r.term], angle);
        }
        noise.apply_half(rho, frame);
    }
    Ok(())
}

/// Noisy Trotterized propagation of `rho` under `h` with freshly sampled
/// noise for every frame and qubit.
pub fn noisy_propagate(
    rho: &DensityMatrix,
    h: &ParametricHamiltonian,
    cfg: &TrotterConfig,
    noise: &NoiseConfig,
) -> Result<DensityMatrix> {
    if h.n_qubits() != rho.n_qubits {
        return Err(HebmError::DimensionMismatch {
            expected: rho.n_qubits,
            found: h.n_qubits(),
        });
    }
    let circuit = TrotterCircuit::new(h, cfg, rho.bit_order)?;
    let realization = NoiseRealization::sample(noise, rho.n_qubits, cfg.n_dt)?;
    let mut out = rho.clone();
    propagate_density(&circuit, &realization, &mut out, &h.coefficients(), None)?;
    out.check_invariants()?;
    Ok(out)
}

/// The Trotter settings used for all noisy runs: 13 frames, second order.
pub fn noisy_trotter_default() -> TrotterConfig {
    TrotterConfig::new(13, TrotterOrder::Second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{prepare_basis_state, prepare_equal_state};

    #[test]
    fn rates_at_zero_and_thirty() {
        assert_eq!(jump_rates(0.0, 0.0, 0.5).unwrap(), (0.0, 0.0));
        let (_, g2) = jump_rates(0.0, 30.0, 1.0).unwrap();
        assert!((g2 - 0.287682).abs() < 1e-6);
        assert!((g2 + 0.75f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rate_domain_boundaries() {
        let (g1, _) = jump_rates(44.9, 0.0, 1.0).unwrap();
        assert!(g1.is_finite() && g1 > 5.0);
        assert!(matches!(
            jump_rates(45.0, 0.0, 1.0),
            Err(HebmError::NoiseAngleOutOfRange { .. })
        ));
        assert!(jump_rates(0.0, 90.0, 1.0).is_err());
        assert!(jump_rates(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sampling() {
        let zero = sample_noise_angles(&NoiseConfig::default(), 20);
        assert!(zero.iter().all(|&(a, b)| a == 0.0 && b == 0.0));
        let cfg = NoiseConfig {
            rng_seed: 9,
            ..NoiseConfig::with_variances(10.0, 20.0)
        };
        let a = sample_noise_angles(&cfg, 50);
        assert_eq!(a, sample_noise_angles(&cfg, 50));
        assert!(a.iter().all(|&(t1, t2)| t1.abs() <= 10.0 && t2.abs() <= 20.0));
    }

    #[test]
    fn channel_errors_and_identity() {
        assert!(single_qubit_channel(-1.0, 0.0, 1.0, JumpDirection::TowardOne).is_err());
        assert!(single_qubit_channel(0.0, -1.0, 1.0, JumpDirection::TowardOne).is_err());
        let id = single_qubit_channel(0.0, 0.0, 0.3, JumpDirection::TowardZero).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn relaxation_reaches_pole() {
        let s = prepare_equal_state(1);
        for (dir, pole) in [(JumpDirection::TowardOne, 1), (JumpDirection::TowardZero, 0)] {
            let ch = single_qubit_channel(0.0, 2.0, 50.0, dir).unwrap();
            let mut rho = DensityMatrix::from_pure(&s);
            rho.apply_channel(&ch, 0).unwrap();
            assert!((rho.get(pole, pole).re - 1.0).abs() < 1e-12);
            assert!(rho.get(0, 1).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_density_roundtrip() {
        let rho = DensityMatrix::from_pure(&prepare_basis_state(2, 2).unwrap());
        assert_eq!(rho.get(2, 2), Complex64::new(1.0, 0.0));
        rho.check_invariants().unwrap();
        assert!(rho.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(NoiseConfig::with_variances(46.0, 0.0).validate().is_err());
        assert!(NoiseConfig::with_variances(0.0, -1.0).validate().is_err());
        assert!(NoiseConfig {
            tau0: Some(0.0),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(NoiseConfig::with_variances(45.0, 45.0).validate().is_ok());
    }
}
