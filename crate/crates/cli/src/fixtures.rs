//! Reference coefficient tables, checked by forward propagation only.

use std::fmt;
use std::str::FromStr;

use hebm_core::{mmd_loss, BitOrder, BornProblem, ParametricHamiltonian, TrotterConfig};
use serde::{Deserialize, Serialize};

use crate::config::{AnsatzKind, ExperimentConfig, InitialState, TargetSpec};
use crate::error::{Context, ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    Bas,
    Gaussian,
    Gibbs,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::Bas, TableId::Gaussian, TableId::Gibbs];

    pub fn text(self) -> &'static str {
        match self {
            TableId::Bas => include_str!("../fixtures/table_bas.txt"),
            TableId::Gaussian => include_str!("../fixtures/table_gaussian.txt"),
            TableId::Gibbs => include_str!("../fixtures/table_gibbs.txt"),
        }
    }

    /// Problem the table was fitted for. Coefficients are left at zero.
    pub fn config(self, bit_order: BitOrder) -> ExperimentConfig {
        let (ansatz, initial_state, target) = match self {
            TableId::Bas => (
                AnsatzKind::BasRing,
                InitialState::Bits("1010".into()),
                TargetSpec::Bas,
            ),
            TableId::Gaussian => (
                AnsatzKind::Parent,
                InitialState::Equal,
                TargetSpec::Gaussian {
                    center: Some(7.5),
                    sigma: 1.0,
                },
            ),
            TableId::Gibbs => (
                AnsatzKind::Parent,
                InitialState::Equal,
                TargetSpec::Gibbs { beta: 1.0 },
            ),
        };
        ExperimentConfig {
            name: format!("table-{self}"),
            n_qubits: 4,
            ansatz,
            initial_state,
            target,
            kernel: Default::default(),
            trotter: TrotterConfig::default(),
            optimizer: Default::default(),
            noise: None,
            n_samples: 1,
            bit_order,
            output_dir: Default::default(),
            sweep: None,
        }
    }

    pub fn hamiltonian(self) -> Result<ParametricHamiltonian> {
        ParametricHamiltonian::from_text(self.text(), 4).context(|| format!("fixture {self}"))
    }

    /// The fixture problem and its coefficients, checked against the
    /// ansatz term order.
    pub fn problem(self, bit_order: BitOrder) -> Result<(BornProblem, Vec<f64>)> {
        let problem = self.config(bit_order).problem()?;
        let table = self.hamiltonian()?;
        let matches = table.len() == problem.n_params()
            && table
                .terms()
                .iter()
                .zip(problem.hamiltonian().terms())
                .all(|(a, b)| a.pauli == b.pauli);
        if !matches {
            return Err(ExperimentError::Config(format!(
                "fixture {self} does not follow the ansatz term order"
            )));
        }
        Ok((problem, table.coefficients()))
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableId::Bas => "bas",
            TableId::Gaussian => "gaussian",
            TableId::Gibbs => "gibbs",
        })
    }
}

impl FromStr for TableId {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| ExperimentError::MissingFixture(s.to_string()))
    }
}

/// MMD loss of the table's coefficients against its target.
pub fn verify_table_fixture(table: TableId, bit_order: BitOrder) -> Result<f64> {
    let (problem, theta) = table.problem(bit_order)?;
    let x = problem
        .distribution(&theta)
        .context(|| format!("fixture {table}"))?;
    mmd_loss(&x, problem.target(), problem.kernel()).context(|| format!("fixture {table}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_parse_in_ansatz_order() {
        for t in TableId::ALL {
            let (problem, theta) = t.problem(BitOrder::MsbFirst).unwrap();
            assert_eq!(theta.len(), problem.n_params());
        }
        assert_eq!(TableId::Gibbs.hamiltonian().unwrap().coefficients()[10], 0.86);
    }

    #[test]
    fn unknown_table() {
        assert!(matches!(
            "ising".parse::<TableId>(),
            Err(ExperimentError::MissingFixture(_))
        ));
        assert_eq!("gibbs".parse::<TableId>().unwrap(), TableId::Gibbs);
    }
}
