//! Dense-matrix oracles shared by the integration tests.
//!
//! Everything here is built from explicit Kronecker products, independent of
//! the bit-twiddling kernels in the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nnvqe::ansatz::Circuit;
use nnvqe::hamiltonian::{Pauli, PauliString, PauliSum};
use nnvqe::state::{Gate, GateKind, StateVector};

pub type Mat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(p: Pauli) -> Mat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `ops[n-1] ⊗ … ⊗ ops[0]`, so qubit 0 is the least-significant index bit.
pub fn kron_ops(ops: &[Pauli]) -> Mat {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for &p in ops.iter().rev() {
        m = m.kronecker(&pauli(p));
    }
    m
}

pub fn dense_string(s: &PauliString) -> Mat {
    kron_ops(s.ops()) * c(s.coefficient(), 0.0)
}

pub fn dense_sum(h: &PauliSum) -> Mat {
    let dim = 1 << h.n_qubits();
    h.terms().iter().fold(DMatrix::zeros(dim, dim), |acc, t| acc + dense_string(t))
}

pub fn generator(n: usize, gate: &Gate) -> Mat {
    let p = match gate.kind {
        GateKind::Rx | GateKind::Rxx => Pauli::X,
        GateKind::Ryy => Pauli::Y,
        GateKind::Rz | GateKind::Rzz => Pauli::Z,
    };
    let mut ops = vec![Pauli::I; n];
    for &q in gate.qubits() {
        ops[q] = p;
    }
    kron_ops(&ops)
}

/// `exp(−iθG/2) = cos(θ/2) I − i sin(θ/2) G` since `G² = I`.
pub fn dense_gate(n: usize, gate: &Gate, angle: f64) -> Mat {
    let dim = 1 << n;
    let eye = DMatrix::<Complex64>::identity(dim, dim);
    eye * c((angle / 2.0).cos(), 0.0) + generator(n, gate) * c(0.0, -(angle / 2.0).sin())
}

pub fn to_vec(s: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn dense_circuit(circuit: &Circuit, theta: &[f64]) -> DVector<Complex64> {
    let n = circuit.n_qubits();
    let mut v = DVector::zeros(1 << n);
    v[0] = c(1.0, 0.0);
    for g in circuit.gates() {
        v = dense_gate(n, g, theta[g.param_slot]) * v;
    }
    v
}

pub fn dense_expectation(m: &Mat, v: &DVector<Complex64>) -> Complex64 {
    v.dotc(&(m * v))
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1 << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut s = StateVector::from_amplitudes(n, amps).unwrap();
    s.normalize();
    s
}

pub fn random_pauli_sum(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> PauliSum {
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let strings = (0..terms)
        .map(|_| {
            let ops = (0..n).map(|_| all[rng.random_range(0..4)]).collect();
            PauliString::new(ops, rng.random_range(-2.0..2.0)).unwrap()
        })
        .collect();
    PauliSum::new(n, strings).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_theta(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

/// Lowest eigenvalue by power iteration on `s I − H`.
pub fn power_iteration_ground(h: &Mat, iters: usize) -> f64 {
    let dim = h.nrows();
    let shift: f64 = h.row_iter().map(|r| r.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    let shifted = DMatrix::<Complex64>::identity(dim, dim) * c(shift, 0.0) - h;
    let mut v = DVector::from_fn(dim, |i, _| c(1.0 + (i as f64 * 0.37).sin(), 0.0));
    for _ in 0..iters {
        v = &shifted * v;
        let norm = v.norm();
        v /= c(norm, 0.0);
    }
    dense_expectation(h, &v).re
}

pub type Builder = fn(usize, usize) -> nnvqe::Result<Circuit>;
