//! The Born-machine training problem: propagate an initial state under a
//! parametric Hamiltonian, read out the basis distribution, and score it
//! against a target with the MMD loss.

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::ProbabilityDistribution;
use crate::error::{HebmError, Result};
use crate::hamiltonian::ParametricHamiltonian;
use crate::mmd::{mmd_quadratic, KernelMatrix};
use crate::noise::{propagate_density, DensityMatrix, NoiseConfig, NoiseRealization};
use crate::optimizer::{self, GradientMode, Minimization, Objective, OptimizerConfig, Termination};
use crate::statevector::{AngleShift, StateVector, TrotterCircuit, TrotterConfig};

#[derive(Debug, Clone)]
pub struct BornProblem {
    hamiltonian: ParametricHamiltonian,
    initial: StateVector,
    target: ProbabilityDistribution,
    kernel: KernelMatrix,
    trotter: TrotterConfig,
    circuit: TrotterCircuit,
    noise: Option<NoiseRealization>,
}

impl BornProblem {
    pub fn new(
        hamiltonian: ParametricHamiltonian,
        initial: StateVector,
        target: ProbabilityDistribution,
        kernel: KernelMatrix,
        trotter: TrotterConfig,
    ) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        for found in [initial.n_qubits(), target.n_qubits()] {
            if found != n {
                return Err(HebmError::DimensionMismatch { expected: n, found });
            }
        }
        if kernel.dim() != 1 << n {
            return Err(HebmError::DimensionMismatch {
                expected: 1 << n,
                found: kernel.dim(),
            });
        }
        let circuit = TrotterCircuit::new(&hamiltonian, &trotter, initial.bit_order())?;
        Ok(Self {
            hamiltonian,
            initial,
            target,
            kernel,
            trotter,
            circuit,
            noise: None,
        })
    }

    /// Switches to density-matrix propagation with one noise history sampled
    /// from `noise`. The history is fixed for the lifetime of the problem, so
    /// every loss and gradient evaluation sees the same noise.
    pub fn with_noise(mut self, noise: &NoiseConfig) -> Result<Self> {
        self.noise = Some(NoiseRealization::sample(
            noise,
            self.hamiltonian.n_qubits(),
            self.trotter.n_dt,
        )?);
        Ok(self)
    }

    pub fn with_noise_realization(mut self, realization: NoiseRealization) -> Result<Self> {
        if realization.n_frames() != self.trotter.n_dt {
            return Err(HebmError::DimensionMismatch {
                expected: self.trotter.n_dt,
                found: realization.n_frames(),
            });
        }
        self.noise = Some(realization);
        Ok(self)
    }

    pub fn hamiltonian(&self) -> &ParametricHamiltonian {
        &self.hamiltonian
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn target(&self) -> &ProbabilityDistribution {
        &self.target
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    pub fn trotter(&self) -> &TrotterConfig {
        &self.trotter
    }

    pub fn noise(&self) -> Option<&NoiseRealization> {
        self.noise.as_ref()
    }

    pub fn n_params(&self) -> usize {
        self.hamiltonian.len()
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(HebmError::DimensionMismatch {
                expected: self.n_params(),
                found: theta.len(),
            });
        }
        Ok(())
    }

    /// Output populations, optionally with one rotation angle shifted.
    fn raw_distribution(&self, theta: &[f64], shift: Option<AngleShift>) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        match &self.noise {
            None => {
                let out = self.circuit.propagate(&self.initial, theta, shift)?;
                Ok(out.amplitudes().iter().map(Complex64::norm_sqr).collect())
            }
            Some(noise) => {
                let mut rho = DensityMatrix::from_pure(&self.initial);
                propagate_density(&self.circuit, noise, &mut rho, theta, shift)?;
                rho.check_invariants()?;
                Ok(rho.diagonal().into_iter().map(|p| p.max(0.0)).collect())
            }
        }
    }

    pub fn distribution(&self, theta: &[f64]) -> Result<ProbabilityDistribution> {
        ProbabilityDistribution::new(self.hamiltonian.n_qubits(), self.raw_distribution(theta, None)?)
    }

    pub fn loss(&self, theta: &[f64]) -> Result<f64> {
        let x = self.raw_distribution(theta, None)?;
        let loss = mmd_quadratic(&x, self.target.probs(), &self.kernel)?;
        if !loss.is_finite() {
            return Err(HebmError::NonFiniteLoss(theta.to_vec()));
        }
        Ok(loss)
    }

    /// `dF/dtheta_j = 2 (x - f)^T K dx/dtheta_j`, with `dx/dtheta_j` summed over
    /// every occurrence of term `j` in the Trotter circuit. An occurrence
    /// rotating by `s * theta_j` contributes `s (x(+pi/4) - x(-pi/4))`, the
    /// shift being applied to that occurrence's angle alone.
    pub fn parameter_shift_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let x = self.raw_distribution(theta, None)?;
        let diff: Vec<f64> = x.iter().zip(self.target.probs()).map(|(a, b)| a - b).collect();
        let weight: Vec<f64> = self.kernel.apply(&diff).into_iter().map(|v| 2.0 * v).collect();

        let frame = self.circuit.frame();
        let occurrences: Vec<(usize, usize)> = (0..self.circuit.n_frames())
            .flat_map(|f| (0..frame.len()).map(move |i| (f, i)))
            .collect();
        let contributions = occurrences
            .par_iter()
            .map(|&(f, index)| {
                let plus = self.raw_distribution(
                    theta,
                    Some(AngleShift {
                        frame: f,
                        index,
                        delta: FRAC_PI_4,
                    }),
                )?;
                let minus = self.raw_distribution(
                    theta,
                    Some(AngleShift {
                        frame: f,
                        index,
                        delta: -FRAC_PI_4,
                    }),
                )?;
                let dx: f64 = weight
                    .iter()
                    .zip(plus.iter().zip(&minus))
                    .map(|(w, (p, m))| w * (p - m))
                    .sum();
                Ok((frame[index].term, frame[index].scale * dx))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut grad = vec![0.0; self.n_params()];
        for (term, c) in contributions {
            grad[term] += c;
        }
        Ok(grad)
    }

    pub fn gradient(&self, theta: &[f64], mode: GradientMode, fd_step: f64) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        match mode {
            GradientMode::FiniteDifference => optimizer::central_difference(|p| self.loss(p), theta, fd_step),
            GradientMode::ParameterShift => self.parameter_shift_gradient(theta),
        }
    }

    /// Minimizes from the seeded random start in `config.rng_seed`.
    pub fn fit(&self, config: &OptimizerConfig) -> Result<LossTrace> {
        let x0 = optimizer::random_initial_parameters(self.n_params(), config.rng_seed);
        self.fit_from(&x0, config)
    }

    pub fn fit_from(&self, x0: &[f64], config: &OptimizerConfig) -> Result<LossTrace> {
        let start = Instant::now();
        let run = optimizer::minimize(self, x0, config)?;
        LossTrace::from_run(self, run, start.elapsed().as_secs_f64())
    }
}

impl Objective for BornProblem {
    fn dim(&self) -> usize {
        self.n_params()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.loss(x)
    }

    fn gradient(&self, x: &[f64], mode: GradientMode, fd_step: f64) -> Result<Vec<f64>> {
        BornProblem::gradient(self, x, mode, fd_step)
    }
}

/// Record of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossTrace {
    /// Loss at the start and after every accepted iteration.
    pub losses: Vec<f64>,
    /// Distribution at iteration `iterations_used / 2`.
    pub half_distribution: ProbabilityDistribution,
    pub final_distribution: ProbabilityDistribution,
    pub initial_parameters: Vec<f64>,
    pub final_parameters: Vec<f64>,
    pub iterations_used: usize,
    pub termination: Termination,
    pub wall_time_seconds: f64,
}

impl LossTrace {
    fn from_run(problem: &BornProblem, run: Minimization, wall_time_seconds: f64) -> Result<Self> {
        let half = &run.parameter_history[run.iterations / 2];
        Ok(Self {
            half_distribution: problem.distribution(half)?,
            final_distribution: problem.distribution(&run.parameters)?,
            initial_parameters: run.parameter_history[0].clone(),
            losses: run.losses,
            final_parameters: run.parameters,
            iterations_used: run.iterations,
            termination: run.termination,
            wall_time_seconds,
        })
    }

    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("trace always holds the starting loss")
    }

    pub fn converged(&self) -> bool {
        matches!(
            self.termination,
            Termination::LossChange | Termination::GradientNorm | Termination::TargetLoss
        )
    }
}

/// Loss of `theta` on the noiseless statevector pipeline.
pub fn loss_of_parameters(theta: &[f64], problem: &BornProblem) -> Result<f64> {
    match problem.noise {
        None => problem.loss(theta),
        Some(_) => BornProblem {
            noise: None,
            ..problem.clone()
        }
        .loss(theta),
    }
}

/// Loss of `theta` with one noise history sampled from `noise`.
pub fn noisy_loss_of_parameters(theta: &[f64], problem: &BornProblem, noise: &NoiseConfig) -> Result<f64> {
    problem.clone().with_noise(noise)?.loss(theta)
}

pub fn gradient(theta: &[f64], problem: &BornProblem, mode: GradientMode, fd_step: f64) -> Result<Vec<f64>> {
    problem.gradient(theta, mode, fd_step)
}
