//! Pauli strings and their action on computational-basis amplitudes.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HebmError, Result};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Mapping from qubit labels to bit positions of the basis index.
///
/// `MsbFirst` makes qubit 0 the most significant bit, so the qubit string
/// `1010` is basis index 10 on four qubits. `LsbFirst` reverses this and the
/// same string is index 5.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitOrder {
    #[default]
    MsbFirst,
    LsbFirst,
}

impl BitOrder {
    /// Bit position (0 = least significant) that carries `qubit`.
    pub fn bit_position(self, qubit: usize, n_qubits: usize) -> usize {
        match self {
            BitOrder::MsbFirst => n_qubits - 1 - qubit,
            BitOrder::LsbFirst => qubit,
        }
    }

    /// Basis index of a qubit string such as `"1010"`, qubit 0 first.
    pub fn index_of_bits(self, bits: &str) -> Result<usize> {
        let n = bits.len();
        let mut index = 0usize;
        for (q, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => index |= 1 << self.bit_position(q, n),
                _ => {
                    return Err(HebmError::InvalidConfig(format!(
                        "qubit string {bits:?} contains {c:?}"
                    )))
                }
            }
        }
        Ok(index)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BitOrder::MsbFirst => "msb-first",
            BitOrder::LsbFirst => "lsb-first",
        }
    }
}

impl std::str::FromStr for BitOrder {
    type Err = HebmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "msb-first" | "msb" => Ok(BitOrder::MsbFirst),
            "lsb-first" | "lsb" => Ok(BitOrder::LsbFirst),
            other => Err(HebmError::InvalidConfig(format!("unknown bit order {other:?}"))),
        }
    }
}

/// Tensor product of single-qubit Paulis over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            axes: vec![Pauli::I; n_qubits],
        }
    }

    pub fn from_axes(axes: Vec<Pauli>) -> Self {
        Self { axes }
    }

    /// Builds a string from `(axis, qubit)` pairs, identity elsewhere.
    pub fn from_sparse(n_qubits: usize, ops: &[(Pauli, usize)]) -> Result<Self> {
        let mut axes = vec![Pauli::I; n_qubits];
        let mut seen = vec![false; n_qubits];
        for &(p, q) in ops {
            if q >= n_qubits {
                return Err(HebmError::QubitOutOfRange { index: q, n_qubits });
            }
            if seen[q] {
                return Err(HebmError::InvalidPauli {
                    label: format!("{ops:?}"),
                    reason: format!("qubit {q} listed twice"),
                });
            }
            seen[q] = true;
            axes[q] = p;
        }
        Ok(Self { axes })
    }

    /// Parses either the dense form (`"XYZI"`, one letter per qubit) or the
    /// sparse form (`"X0 Z2"`, axis followed by qubit index).
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let text = text.trim();
        let invalid = |reason: String| HebmError::InvalidPauli {
            label: text.to_string(),
            reason,
        };
        let sparse = text.contains(char::is_whitespace) || text.contains(|c: char| c.is_ascii_digit());
        if !sparse {
            if text == "I" {
                return Ok(Self::identity(n_qubits));
            }
            if text.chars().count() != n_qubits {
                return Err(invalid(format!(
                    "dense label has length {}, expected {n_qubits}",
                    text.chars().count()
                )));
            }
            let axes = text
                .chars()
                .map(|c| Pauli::from_char(c).ok_or_else(|| invalid(format!("invalid character {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self { axes });
        }

        let mut ops = Vec::new();
        for token in text.split_whitespace() {
            let mut chars = token.chars();
            let head = chars.next().expect("split_whitespace yields non-empty tokens");
            let axis =
                Pauli::from_char(head).ok_or_else(|| invalid(format!("invalid character {head:?}")))?;
            let rest = chars.as_str();
            let qubit: usize = rest
                .parse()
                .map_err(|_| invalid(format!("bad qubit index in {token:?}")))?;
            ops.push((axis, qubit));
        }
        Self::from_sparse(n_qubits, &ops).map_err(|e| match e {
            HebmError::InvalidPauli { reason, .. } => invalid(reason),
            other => other,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn to_dense_label(&self) -> String {
        self.axes.iter().map(|p| p.as_char()).collect()
    }

    /// Sparse label such as `"Z2 Z3"`; the identity prints as `"I"`.
    pub fn to_sparse_label(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, p)| format!("{}{q}", p.as_char()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn mask(&self, order: BitOrder) -> PauliMask {
        let n = self.axes.len();
        let mut flip = 0usize;
        let mut phase = 0usize;
        let mut y_count = 0u32;
        for (q, &p) in self.axes.iter().enumerate() {
            let bit = 1usize << order.bit_position(q, n);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Z => phase |= bit,
                Pauli::Y => {
                    flip |= bit;
                    phase |= bit;
                    y_count += 1;
                }
            }
        }
        PauliMask::new(flip, phase, y_count)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sparse_label())
    }
}

/// Bit-mask form of a Pauli string for a fixed bit order.
///
/// `P|b> = i^y (-1)^{popcount(b & phase)} |b ^ flip>`, using `Y = iXZ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliMask {
    pub flip: usize,
    pub phase: usize,
    y_factor: Complex64,
}

impl PauliMask {
    pub fn new(flip: usize, phase: usize, y_count: u32) -> Self {
        let y_factor = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Self {
            flip,
            phase,
            y_factor,
        }
    }

    /// Shifts the mask up by `bits` positions (used to address the row
    /// index of a vectorized density matrix).
    pub fn shifted(self, bits: u32) -> Self {
        Self {
            flip: self.flip << bits,
            phase: self.phase << bits,
            y_factor: self.y_factor,
        }
    }

    /// Mask of the elementwise complex conjugate `P*`, which is `P` up to
    /// the sign `(-1)^y`.
    pub fn conjugated(self) -> Self {
        Self {
            y_factor: self.y_factor.conj(),
            ..self
        }
    }

    /// Coefficient of `|b ^ flip>` in `P|b>`.
    #[inline]
    pub fn phase_at(&self, b: usize) -> Complex64 {
        if (b & self.phase).count_ones().is_multiple_of(2) {
            self.y_factor
        } else {
            -self.y_factor
        }
    }

    /// Writes `P|psi>` into `out`.
    pub fn apply(&self, amps: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), out.len());
        for (b, &a) in amps.iter().enumerate() {
            out[b ^ self.flip] = self.phase_at(b) * a;
        }
    }

    /// In-place `exp(-i angle P)|psi> = cos(angle)|psi> - i sin(angle) P|psi>`.
    pub fn rotate(&self, amps: &mut [Complex64], angle: f64) {
        let (s, c) = angle.sin_cos();
        let minus_i_sin = Complex64::new(0.0, -s);
        if self.flip == 0 {
            // Diagonal: phase_at is real +-1 here.
            let plus = Complex64::new(c, 0.0) + minus_i_sin * self.y_factor;
            let minus = Complex64::new(c, 0.0) - minus_i_sin * self.y_factor;
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= if (b & self.phase).count_ones().is_multiple_of(2) {
                    plus
                } else {
                    minus
                };
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - self.flip.leading_zeros());
        for b in 0..amps.len() {
            if b & top != 0 {
                continue;
            }
            let partner = b ^ self.flip;
            let a0 = amps[b];
            let a1 = amps[partner];
            amps[b] = a0 * c + minus_i_sin * self.phase_at(partner) * a1;
            amps[partner] = a1 * c + minus_i_sin * self.phase_at(b) * a0;
        }
    }
}
