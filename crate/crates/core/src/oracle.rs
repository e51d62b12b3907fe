//! Dense reference implementations used to check the fast paths.
//!
//! Everything here builds full matrices with `nalgebra` and exponentiates
//! them directly. Nothing in this module calls the bit-mask kernels,
//! Trotter circuits, or closed-form channels it is meant to check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{BitOrder, Pauli, PauliString};
use crate::ParametricHamiltonian;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn pauli_matrix(p: Pauli) -> CMatrix {
    let entries = match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// Kronecker product of the per-qubit matrices, most significant factor
/// first according to `order`.
pub fn dense_pauli(p: &PauliString, order: BitOrder) -> CMatrix {
    let mut factors: Vec<CMatrix> = p.axes().iter().map(|&a| pauli_matrix(a)).collect();
    if order == BitOrder::LsbFirst {
        factors.reverse();
    }
    factors
        .into_iter()
        .fold(CMatrix::from_element(1, 1, ONE), |acc, f| acc.kronecker(&f))
}

pub fn dense_hamiltonian(h: &ParametricHamiltonian, order: BitOrder) -> CMatrix {
    let dim = 1usize << h.n_qubits();
    h.terms().iter().fold(CMatrix::zeros(dim, dim), |acc, t| {
        acc + dense_pauli(&t.pauli, order) * Complex64::new(t.theta, 0.0)
    })
}

/// `exp(-i H t / 2)` by dense exponentiation.
pub fn dense_propagator(h: &ParametricHamiltonian, total_time: f64, order: BitOrder) -> CMatrix {
    (dense_hamiltonian(h, order) * Complex64::new(0.0, -0.5 * total_time)).exp()
}

/// `exp(-i angle P)` by dense exponentiation.
pub fn dense_rotation(p: &PauliString, angle: f64, order: BitOrder) -> CMatrix {
    (dense_pauli(p, order) * Complex64::new(0.0, -angle)).exp()
}

pub fn apply(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (m * nalgebra::DVector::from_column_slice(v))
        .iter()
        .cloned()
        .collect()
}

/// Single-qubit operator `op` acting on `qubit` of an `n_qubits` register.
pub fn embed(op: &CMatrix, qubit: usize, n_qubits: usize, order: BitOrder) -> CMatrix {
    let position = match order {
        BitOrder::MsbFirst => qubit,
        BitOrder::LsbFirst => n_qubits - 1 - qubit,
    };
    (0..n_qubits).fold(CMatrix::from_element(1, 1, ONE), |acc, k| {
        if k == position {
            acc.kronecker(op)
        } else {
            acc.kronecker(&CMatrix::identity(2, 2))
        }
    })
}

/// Superoperator of `rho -> A rho B` on row-major `vec(rho)`.
pub fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(&b.transpose())
}

/// `-i [H, .]` on row-major `vec(rho)`.
pub fn commutator_generator(h: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(h.nrows(), h.ncols());
    (sandwich(h, &id) - sandwich(&id, h)) * (-I)
}

/// `rho -> 2 L rho L^+ - {L^+ L, rho}` on row-major `vec(rho)`.
pub fn dissipator(l: &CMatrix) -> CMatrix {
    let ld = l.adjoint();
    let ldl = &ld * l;
    let id = CMatrix::identity(l.nrows(), l.ncols());
    sandwich(l, &ld) * Complex64::new(2.0, 0.0) - sandwich(&ldl, &id) - sandwich(&id, &ldl)
}

/// Dephasing operator `sqrt(gamma1) / 2 Z`.
pub fn phase_kick_operator(gamma1: f64) -> CMatrix {
    pauli_matrix(Pauli::Z) * Complex64::new(0.5 * gamma1.sqrt(), 0.0)
}

/// Relaxation operator `sqrt(gamma2 / 8) (X -+ iY)`; the minus sign lowers
/// `|0>` into `|1>`.
pub fn pole_kick_operator(gamma2: f64, toward_one: bool) -> CMatrix {
    let sign = if toward_one { -I } else { I };
    (pauli_matrix(Pauli::X) + pauli_matrix(Pauli::Y) * sign) * Complex64::new((gamma2 / 8.0).sqrt(), 0.0)
}

/// Row-major vectorization of a square matrix.
pub fn vectorize(m: &CMatrix) -> Vec<Complex64> {
    (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .map(|(r, c)| m[(r, c)])
        .collect()
}

pub fn outer(v: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
}

/// `(x - f)^T K (x - f)` by an explicit double loop over `K_ij` computed
/// from the Gaussian formula.
pub fn naive_gaussian_mmd(x: &[f64], f: &[f64], bandwidths: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            let d = i as f64 - j as f64;
            let k: f64 = bandwidths.iter().map(|c| (-d * d / (2.0 * c)).exp()).sum();
            total += (x[i] - f[i]) * k * (x[j] - f[j]);
        }
    }
    total
}

/// Boltzmann weights of the ferromagnetic Ising ring, spin `+1` for bit 0,
/// qubit 0 most significant.
pub fn brute_force_gibbs(n_qubits: usize, beta: f64) -> Vec<f64> {
    let weights: Vec<f64> = (0..1usize << n_qubits)
        .map(|b| {
            let spins: Vec<f64> = (0..n_qubits)
                .map(|q| {
                    if (b >> (n_qubits - 1 - q)) & 1 == 1 {
                        -1.0
                    } else {
                        1.0
                    }
                })
                .collect();
            let energy: f64 = -(0..n_qubits)
                .map(|j| spins[j] * spins[(j + 1) % n_qubits])
                .sum::<f64>();
            (-beta * energy).exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_puts_qubit_zero_on_top() {
        let p = PauliString::parse("XI", 2).unwrap();
        let m = dense_pauli(&p, BitOrder::MsbFirst);
        // X on qubit 0 maps |00> (0) to |10> (2)
        assert_eq!(m[(2, 0)], ONE);
        let m = dense_pauli(&p, BitOrder::LsbFirst);
        assert_eq!(m[(1, 0)], ONE);
    }

    #[test]
    fn dissipators_conserve_trace() {
        let l = pole_kick_operator(0.7, true);
        let d = dissipator(&l);
        // trace functional is rows 0 and 3 summed
        for col in 0..4 {
            assert!((d[(0, col)] + d[(3, col)]).norm() < 1e-15);
        }
    }
}
