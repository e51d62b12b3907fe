//! Experiment configuration, read from TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hebm_core::{
    bas_distribution, build_bas_ansatz, build_parent_ansatz, gaussian_distribution, gibbs_distribution,
    prepare_basis_state, prepare_equal_state, BitOrder, BornProblem, GaussianSpec, GibbsSpec, KernelSpec,
    NoiseConfig, OptimizerConfig, ParametricHamiltonian, ProbabilityDistribution, StateVector, TrotterConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::{io_error, Context, ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    /// XX, YY, ZZ ring couplings plus single-qubit Z.
    BasRing,
    /// ZZ ring, ZXZ, and single-qubit X.
    Parent,
}

impl AnsatzKind {
    pub fn build(self, n_qubits: usize) -> hebm_core::Result<ParametricHamiltonian> {
        match self {
            AnsatzKind::BasRing => build_bas_ansatz(n_qubits),
            AnsatzKind::Parent => build_parent_ansatz(n_qubits),
        }
    }
}

/// `equal`, `basis:<index>`, or `bits:<b0 b1 ...>` with character `q`
/// giving the value of qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InitialState {
    Equal,
    Basis(usize),
    Bits(String),
}

impl FromStr for InitialState {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            ExperimentError::Config(format!(
                "initial_state {s:?}: expected equal, basis:<i> or bits:<01..>"
            ))
        };
        if s == "equal" {
            return Ok(InitialState::Equal);
        }
        if let Some(i) = s.strip_prefix("basis:") {
            return i.parse().map(InitialState::Basis).map_err(|_| bad());
        }
        if let Some(b) = s.strip_prefix("bits:") {
            if !b.is_empty() && b.chars().all(|c| c == '0' || c == '1') {
                return Ok(InitialState::Bits(b.to_string()));
            }
        }
        Err(bad())
    }
}

impl TryFrom<String> for InitialState {
    type Error = ExperimentError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Equal => write!(f, "equal"),
            InitialState::Basis(i) => write!(f, "basis:{i}"),
            InitialState::Bits(b) => write!(f, "bits:{b}"),
        }
    }
}

impl From<InitialState> for String {
    fn from(s: InitialState) -> String {
        s.to_string()
    }
}

impl InitialState {
    pub fn prepare(&self, n_qubits: usize, order: BitOrder) -> Result<StateVector> {
        let index = match self {
            InitialState::Equal => return Ok(prepare_equal_state(n_qubits).with_bit_order(order)),
            InitialState::Basis(i) => *i,
            InitialState::Bits(bits) => {
                if bits.len() != n_qubits {
                    return Err(ExperimentError::Config(format!(
                        "initial_state bits:{bits} has {} digits for {n_qubits} qubits",
                        bits.len()
                    )));
                }
                bits.bytes()
                    .enumerate()
                    .filter(|(_, b)| *b == b'1')
                    .fold(0, |acc, (q, _)| {
                        acc | match order {
                            BitOrder::MsbFirst => 1 << (n_qubits - 1 - q),
                            BitOrder::LsbFirst => 1 << q,
                        }
                    })
            }
        };
        Ok(prepare_basis_state(n_qubits, index)
            .context(|| format!("initial state {self}"))?
            .with_bit_order(order))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Bars and stripes on a square grid.
    Bas,
    /// `center` defaults to the middle of the basis range.
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<f64>,
        sigma: f64,
    },
    /// Ferromagnetic Ising ring.
    Gibbs {
        #[serde(default = "unit_beta")]
        beta: f64,
    },
    /// JSON array of `2^n` nonnegative weights, normalized on load. Relative
    /// paths resolve against the config file's directory.
    CustomFile { path: PathBuf },
}

fn unit_beta() -> f64 {
    1.0
}

impl TargetSpec {
    pub fn build(&self, n_qubits: usize) -> Result<ProbabilityDistribution> {
        let ctx = || format!("target {self:?}");
        match self {
            TargetSpec::Bas => bas_distribution(n_qubits).context(ctx),
            TargetSpec::Gaussian { center, sigma } => gaussian_distribution(&GaussianSpec {
                n_qubits,
                center: center.unwrap_or(((1usize << n_qubits) as f64 - 1.0) / 2.0),
                sigma: *sigma,
            })
            .context(ctx),
            TargetSpec::Gibbs { beta } => gibbs_distribution(&GibbsSpec {
                n_qubits,
                beta: *beta,
            })
            .context(ctx),
            TargetSpec::CustomFile { path } => {
                let text = std::fs::read_to_string(path).map_err(io_error(path))?;
                let weights: Vec<f64> = serde_json::from_str(&text).map_err(|e| ExperimentError::Parse {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                ProbabilityDistribution::from_weights(n_qubits, weights).context(ctx)
            }
        }
    }
}

/// Grids for the sweep verbs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_dt_values: Vec<usize>,
    /// Loss that counts as reached in the timing sweep.
    pub threshold: f64,
    pub phase_variances: Vec<f64>,
    pub pole_variances: Vec<f64>,
    pub b_values: Vec<f64>,
    /// Each entry sets both kick variances.
    pub noise_variances: Vec<f64>,
    /// Samples per noise-grid cell; the experiment's `n_samples` if unset.
    pub grid_samples: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let every_five: Vec<f64> = (0..10).map(|k| 5.0 * k as f64).collect();
        Self {
            n_dt_values: vec![1, 5, 10, 20, 40],
            threshold: 1e-4,
            phase_variances: every_five.clone(),
            pole_variances: every_five,
            b_values: vec![
                0.1, 0.125, 0.15, 0.175, 0.2, 0.225, 0.25, 0.275, 0.3, 0.325, 0.35, 0.4, 0.5, 1.0, 2.0, 4.0,
            ],
            noise_variances: vec![0.0, 5.0, 10.0, 20.0, 30.0, 45.0],
            grid_samples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub n_qubits: usize,
    pub ansatz: AnsatzKind,
    pub initial_state: InitialState,
    pub target: TargetSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub trotter: TrotterConfig,
    /// `rng_seed` is the base seed; sample `k` uses `rng_seed + k`.
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Switches to the density-matrix path. Sample `k` draws its noise
    /// history with seed `rng_seed + k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub bit_order: BitOrder,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_samples() -> usize {
    5
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// Configs shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("bas-4q", include_str!("../configs/bas-4q.toml")),
    ("gaussian-4q", include_str!("../configs/gaussian-4q.toml")),
    (
        "gibbs-4q-from-basis",
        include_str!("../configs/gibbs-4q-from-basis.toml"),
    ),
    (
        "gibbs-4q-from-equal",
        include_str!("../configs/gibbs-4q-from-equal.toml"),
    ),
    ("gibbs-8q", include_str!("../configs/gibbs-8q.toml")),
    (
        "bas-from-equal-4q",
        include_str!("../configs/bas-from-equal-4q.toml"),
    ),
    ("noise-gibbs", include_str!("../configs/noise-gibbs.toml")),
    ("noise-bas", include_str!("../configs/noise-bas.toml")),
    ("kl-gauss", include_str!("../configs/kl-gauss.toml")),
    ("timing", include_str!("../configs/timing.toml")),
];

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| ExperimentError::Parse {
            path: origin.to_path_buf(),
            reason: e.to_string(),
        })
    }

    /// Reads a config file, falling back to a bundled config of that name.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            if let Some(cfg) = path.to_str().and_then(Self::bundled) {
                return cfg;
            }
        }
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        let mut cfg = Self::from_toml(&text, path)?;
        if let TargetSpec::CustomFile { path: target } = &mut cfg.target {
            if target.is_relative() {
                if let Some(dir) = path.parent() {
                    *target = dir.join(&*target);
                }
            }
        }
        Ok(cfg)
    }

    pub fn bundled(name: &str) -> Option<Result<Self>> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, text)| Self::from_toml(text, Path::new(&format!("<bundled {n}>"))))
    }

    pub fn sweep(&self) -> SweepConfig {
        self.sweep.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(ExperimentError::Config(format!(
                "name {:?} must be a nonempty file name",
                self.name
            )));
        }
        if self.n_samples == 0 {
            return Err(ExperimentError::Config("n_samples must be at least 1".into()));
        }
        let problem = self.problem()?;
        self.optimizer
            .validate(problem.n_params())
            .context(|| "optimizer".into())?;
        if let Some(noise) = &self.noise {
            noise.validate().context(|| "noise".into())?;
        }
        Ok(())
    }

    /// The noiseless problem described by this config.
    pub fn problem(&self) -> Result<BornProblem> {
        let n = self.n_qubits;
        let hamiltonian = self
            .ansatz
            .build(n)
            .context(|| format!("{:?} ansatz", self.ansatz))?;
        let initial = self.initial_state.prepare(n, self.bit_order)?;
        let target = self.target.build(n)?;
        let kernel = self
            .kernel
            .build(n)
            .context(|| format!("kernel {:?}", self.kernel))?;
        BornProblem::new(hamiltonian, initial, target, kernel, self.trotter).context(|| "problem".into())
    }

    /// Optimizer and noise settings of sample `k`.
    pub fn sample_settings(&self, k: usize) -> (OptimizerConfig, Option<NoiseConfig>) {
        let offset = k as u64;
        let optimizer = OptimizerConfig {
            rng_seed: self.optimizer.rng_seed.wrapping_add(offset),
            ..self.optimizer.clone()
        };
        let noise = self.noise.clone().map(|n| NoiseConfig {
            rng_seed: n.rng_seed.wrapping_add(offset),
            ..n
        });
        (optimizer, noise)
    }

    /// Sets both base seeds.
    pub fn set_seed(&mut self, seed: u64) {
        self.optimizer.rng_seed = seed;
        if let Some(noise) = &mut self.noise {
            noise.rng_seed = seed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_forms() {
        for s in ["equal", "basis:10", "bits:1010"] {
            let parsed: InitialState = s.parse().unwrap();
            assert_eq!(parsed.to_string(), s);
        }
        for s in ["", "basis:", "basis:x", "bits:", "bits:102", "uniform"] {
            assert!(s.parse::<InitialState>().is_err(), "{s}");
        }
    }

    #[test]
    fn bit_strings_follow_the_bit_order() {
        let bits = InitialState::Bits("1010".into());
        let msb = bits.prepare(4, BitOrder::MsbFirst).unwrap();
        let lsb = bits.prepare(4, BitOrder::LsbFirst).unwrap();
        assert_eq!(msb.amplitudes()[10].re, 1.0);
        assert_eq!(lsb.amplitudes()[5].re, 1.0);
        assert!(bits.prepare(3, BitOrder::MsbFirst).is_err());
    }

    #[test]
    fn every_bundled_config_validates() {
        for (name, _) in BUNDLED {
            let cfg = ExperimentConfig::bundled(name).unwrap().unwrap();
            assert_eq!(&cfg.name, name);
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let base = ExperimentConfig::bundled("gaussian-4q").unwrap().unwrap();
        let mut c = base.clone();
        c.n_samples = 0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.initial_state = InitialState::Basis(16);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.target = TargetSpec::Bas;
        c.n_qubits = 3;
        assert!(c.validate().is_err());
        let mut c = base;
        c.noise = Some(NoiseConfig::with_variances(50.0, 0.0));
        assert!(c.validate().is_err());
        let unknown = "name = \"x\"\nn_qubits = 4\nansatz = \"parent\"\ninitial_state = \"equal\"\nbogus = 1\n[target]\nkind = \"bas\"\n";
        assert!(ExperimentConfig::from_toml(unknown, Path::new("x")).is_err());
    }

    #[test]
    fn sample_seeds_are_offset() {
        let mut cfg = ExperimentConfig::bundled("noise-gibbs").unwrap().unwrap();
        cfg.set_seed(40);
        let (opt, noise) = cfg.sample_settings(3);
        assert_eq!(opt.rng_seed, 43);
        assert_eq!(noise.unwrap().rng_seed, 43);
    }
}
