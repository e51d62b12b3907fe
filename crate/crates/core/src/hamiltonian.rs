//! Parametric Pauli-word Hamiltonians `H = sum_j theta_j P_j` and the two
//! ring ansätze used for training.

use std::fmt::Write as _;

use crate::error::{HebmError, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub theta: f64,
    pub pauli: PauliString,
}

/// Ordered list of `(theta_j, P_j)` terms. The coefficient vector is the
/// optimization variable and is index-aligned with the term list.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricHamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
}

impl ParametricHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(HebmError::TooFewQubits { min: 1, found: 0 });
        }
        for t in &terms {
            if t.pauli.n_qubits() != n_qubits {
                return Err(HebmError::DimensionMismatch {
                    expected: n_qubits,
                    found: t.pauli.n_qubits(),
                });
            }
        }
        Ok(Self { n_qubits, terms })
    }

    /// Terms with all coefficients set to zero.
    pub fn from_paulis(n_qubits: usize, paulis: Vec<PauliString>) -> Result<Self> {
        Self::new(
            n_qubits,
            paulis
                .into_iter()
                .map(|pauli| Term { theta: 0.0, pauli })
                .collect(),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.theta).collect()
    }

    pub fn set_coefficients(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.terms.len() {
            return Err(HebmError::DimensionMismatch {
                expected: self.terms.len(),
                found: theta.len(),
            });
        }
        for (t, &v) in self.terms.iter_mut().zip(theta) {
            t.theta = v;
        }
        Ok(())
    }

    pub fn with_coefficients(&self, theta: &[f64]) -> Result<Self> {
        let mut h = self.clone();
        h.set_coefficients(theta)?;
        Ok(h)
    }

    /// One term per line, `"<coefficient> <sparse-pauli>"`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            writeln!(out, "{} {}", t.theta, t.pauli.to_sparse_label()).unwrap();
        }
        out
    }

    /// Parses the line format written by [`to_text`](Self::to_text). Blank
    /// lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str, n_qubits: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (coef, label) = line.split_once(char::is_whitespace).ok_or(HebmError::Parse {
                line: i + 1,
                reason: "expected \"<coefficient> <pauli>\"".into(),
            })?;
            let theta: f64 = coef.parse().map_err(|_| HebmError::Parse {
                line: i + 1,
                reason: format!("bad coefficient {coef:?}"),
            })?;
            let pauli = PauliString::parse(label, n_qubits).map_err(|e| HebmError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            terms.push(Term { theta, pauli });
        }
        Self::new(n_qubits, terms)
    }
}

fn ring_pair(n: usize, axis: Pauli, j: usize) -> PauliString {
    let mut axes = vec![Pauli::I; n];
    axes[j] = axis;
    axes[(j + 1) % n] = axis;
    PauliString::from_axes(axes)
}

fn single(n: usize, axis: Pauli, j: usize) -> PauliString {
    let mut axes = vec![Pauli::I; n];
    axes[j] = axis;
    PauliString::from_axes(axes)
}

/// `sum_j (XX_{j,j+1} + YY_{j,j+1} + ZZ_{j,j+1} + Z_j)` on a ring, in that
/// block order. On two qubits the ring wraps onto the same pair, and those
/// duplicate strings keep their own coefficients.
pub fn build_bas_ansatz(n_qubits: usize) -> Result<ParametricHamiltonian> {
    if n_qubits < 2 {
        return Err(HebmError::TooFewQubits {
            min: 2,
            found: n_qubits,
        });
    }
    let n = n_qubits;
    let mut paulis = Vec::with_capacity(4 * n);
    for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
        paulis.extend((0..n).map(|j| ring_pair(n, axis, j)));
    }
    paulis.extend((0..n).map(|j| single(n, Pauli::Z, j)));
    ParametricHamiltonian::from_paulis(n, paulis)
}

/// Parent Hamiltonian of the ZZ ring:
/// `sum_j (Z_j Z_{j+1} + Z_{j-1} X_j Z_{j+1} + X_j)` with cyclic indices,
/// ordered as (ZZ block, ZXZ block, X block).
pub fn build_parent_ansatz(n_qubits: usize) -> Result<ParametricHamiltonian> {
    if n_qubits < 3 {
        return Err(HebmError::TooFewQubits {
            min: 3,
            found: n_qubits,
        });
    }
    let n = n_qubits;
    let mut paulis = Vec::with_capacity(3 * n);
    paulis.extend((0..n).map(|j| ring_pair(n, Pauli::Z, j)));
    for j in 0..n {
        let mut axes = vec![Pauli::I; n];
        axes[(j + n - 1) % n] = Pauli::Z;
        axes[j] = Pauli::X;
        axes[(j + 1) % n] = Pauli::Z;
        paulis.push(PauliString::from_axes(axes));
    }
    paulis.extend((0..n).map(|j| single(n, Pauli::X, j)));
    ParametricHamiltonian::from_paulis(n, paulis)
}
