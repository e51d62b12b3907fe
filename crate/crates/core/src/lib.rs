//! Hamiltonian-engineering Born machine.
//!
//! Fits the coefficients of a Pauli-word Hamiltonian so that the Trotterized
//! propagator `exp(-i H t / 2)` carries an initial state onto a target basis
//! distribution, scored by a kernel MMD loss. Includes an exact statevector
//! simulator, a density-matrix simulator with dephasing and amplitude
//! relaxation, and a bound-constrained limited-memory quasi-Newton optimizer.
// `!(x > 0.0)` is the NaN-rejecting form
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod born;
pub mod distribution;
pub mod error;
pub mod hamiltonian;
pub mod mmd;
pub mod noise;
pub mod optimizer;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod pauli;
pub mod statevector;
pub mod targets;

pub use born::{gradient, loss_of_parameters, noisy_loss_of_parameters, BornProblem, LossTrace};
pub use distribution::ProbabilityDistribution;
pub use error::{HebmError, Result};
pub use hamiltonian::{build_bas_ansatz, build_parent_ansatz, ParametricHamiltonian, Term};
pub use mmd::{
    gaussian_hamming_kernel, gaussian_kernel, identity_kernel, mmd_loss, KernelMatrix, KernelSpec,
};
pub use noise::{
    jump_rates, noisy_propagate, sample_noise_angles, single_qubit_channel, DensityMatrix, JumpDirection,
    NoiseConfig, NoiseRealization, SingleQubitChannel,
};
pub use optimizer::{
    minimize, random_initial_parameters, GradientMode, Minimization, Objective, OptimizerConfig,
};
pub use pauli::{BitOrder, Pauli, PauliString};
pub use statevector::{
    apply_pauli_rotation, prepare_basis_state, prepare_equal_state, probabilities, trotter_propagate,
    StateVector, TrotterConfig, TrotterOrder,
};
pub use targets::{
    bas_distribution, gaussian_distribution, gibbs_distribution, kl_divergence, GaussianSpec, GibbsSpec,
};
