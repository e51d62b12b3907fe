//! Config-driven experiment runner for the Hamiltonian-engineering Born
//! machine: training runs, reference-table checks, and parameter sweeps,
//! all written out as JSON and CSV.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod report;
pub mod run;
pub mod sweep;

pub use config::{AnsatzKind, ExperimentConfig, InitialState, SweepConfig, TargetSpec, BUNDLED};
pub use error::{ExperimentError, Result};
pub use fixtures::{verify_table_fixture, TableId};
pub use report::{DistributionStats, ExperimentReport, Timing};
pub use run::{fit_sample, run_experiment, run_samples};
pub use sweep::{kl_sweep, noise_sweep, timing_sweep, KlRow, NoiseCell, TimingRow};
