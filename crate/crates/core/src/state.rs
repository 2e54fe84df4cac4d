//! Dense statevector simulation.
//!
//! Basis index convention: qubit `q` is bit `q` of the basis-state index, so
//! qubit 0 is the least-significant bit. Every rotation is `exp(-i θ G / 2)`
//! for its Pauli generator `G`.

use num_complex::Complex64;
use std::fmt;

use crate::error::{ensure, Error, Result};

pub const MIN_QUBITS: usize = 3;
pub const MAX_QUBITS: usize = 14;

/// Complex amplitudes over `n_qubits` qubits, length `2^n_qubits`.
///
/// Normalization is not enforced: `H|ψ⟩` products are also carried as
/// `StateVector`s.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubit_count(n)?;
        ensure!(index < 1 << n, Structural, "basis index {index} out of range for {n} qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n)?;
        ensure!(
            amps.len() == 1 << n,
            Structural,
            "expected {} amplitudes for {n} qubits, got {}",
            1usize << n,
            amps.len()
        );
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        ensure!(
            self.n_qubits == other.n_qubits,
            Structural,
            "inner product of {}-qubit and {}-qubit states",
            self.n_qubits,
            other.n_qubits
        );
        Ok(dot(&self.amps, &other.amps))
    }

    /// Applies `gate` rotated by `angle` radians, updating the state in place.
    ///
    /// On error the state is left untouched.
    pub fn apply_gate(&mut self, gate: &Gate, angle: f64) -> Result<()> {
        gate.check_fits(self.n_qubits)?;
        self.apply_rotation(gate.kind, gate.qubits(), angle);
        Ok(())
    }

    /// Unchecked kernel; qubits must already be validated against `n_qubits`.
    pub(crate) fn apply_rotation(&mut self, kind: GateKind, qubits: &[usize], angle: f64) {
        let (s, c) = (0.5 * angle).sin_cos();
        let amps = &mut self.amps;
        match kind {
            GateKind::Rx => {
                let stride = 1 << qubits[0];
                let ms = Complex64::new(0.0, -s);
                for base in (0..amps.len()).step_by(2 * stride) {
                    for i in base..base + stride {
                        let (a, b) = (amps[i], amps[i + stride]);
                        amps[i] = a * c + b * ms;
                        amps[i + stride] = a * ms + b * c;
                    }
                }
            }
            GateKind::Rz => {
                let mask = 1 << qubits[0];
                let down = Complex64::new(c, -s);
                let up = Complex64::new(c, s);
                for (i, a) in amps.iter_mut().enumerate() {
                    *a *= if i & mask == 0 { down } else { up };
                }
            }
            GateKind::Rzz => {
                let mask = (1 << qubits[0]) | (1 << qubits[1]);
                let even = Complex64::new(c, -s);
                let odd = Complex64::new(c, s);
                for (i, a) in amps.iter_mut().enumerate() {
                    *a *= if (i & mask).count_ones().is_multiple_of(2) { even } else { odd };
                }
            }
            GateKind::Rxx | GateKind::Ryy => {
                let (lo, hi) = ordered(qubits[0], qubits[1]);
                let (m_lo, m_hi) = (1 << lo, 1 << hi);
                let ms = Complex64::new(0.0, -s);
                // XX maps |00⟩↔|11⟩ with +1; YY with −1. Both map |01⟩↔|10⟩ with +1.
                let same = if kind == GateKind::Rxx { ms } else { -ms };
                for k in 0..amps.len() / 4 {
                    let i00 = insert_zero_bits(k, lo, hi);
                    let (i01, i10, i11) = (i00 | m_lo, i00 | m_hi, i00 | m_lo | m_hi);
                    let (a00, a01, a10, a11) = (amps[i00], amps[i01], amps[i10], amps[i11]);
                    amps[i00] = a00 * c + a11 * same;
                    amps[i11] = a11 * c + a00 * same;
                    amps[i01] = a01 * c + a10 * ms;
                    amps[i10] = a10 * c + a01 * ms;
                }
            }
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                writeln!(f, "|{:0width$b}⟩ {:+.6} {:+.6}i", i, a.re, a.im, width = self.n_qubits)?;
            }
        }
        Ok(())
    }
}

/// Rotation family; the generator is the named Pauli (tensor) product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Rz,
    Rxx,
    Ryy,
    Rzz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Rz => 1,
            GateKind::Rxx | GateKind::Ryy | GateKind::Rzz => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Rz => "RZ",
            GateKind::Rxx => "RXX",
            GateKind::Ryy => "RYY",
            GateKind::Rzz => "RZZ",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parameterized rotation bound to qubits and to one slot of the flat
/// circuit-parameter vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    qubits: [usize; 2],
    pub param_slot: usize,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize], param_slot: usize) -> Result<Self> {
        ensure!(
            qubits.len() == kind.arity(),
            Structural,
            "{kind} acts on {} qubit(s), got {}",
            kind.arity(),
            qubits.len()
        );
        if kind.arity() == 2 {
            ensure!(qubits[0] != qubits[1], Structural, "{kind} on repeated qubit {}", qubits[0]);
        }
        let second = if kind.arity() == 2 { qubits[1] } else { qubits[0] };
        Ok(Self { kind, qubits: [qubits[0], second], param_slot })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn check_fits(&self, n_qubits: usize) -> Result<()> {
        match self.qubits().iter().find(|&&q| q >= n_qubits) {
            Some(q) => Err(Error::Structural(format!(
                "{} touches qubit {q} but the state has {n_qubits} qubits",
                self.kind
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubits() {
            [q] => write!(f, "{} q{} θ[{}]", self.kind, q, self.param_slot),
            [a, b] => write!(f, "{} q{},q{} θ[{}]", self.kind, a, b, self.param_slot),
            _ => unreachable!(),
        }
    }
}

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    ensure!(
        (MIN_QUBITS..=MAX_QUBITS).contains(&n),
        Config,
        "qubit count {n} outside supported range {MIN_QUBITS}..={MAX_QUBITS}"
    );
    Ok(())
}

pub(crate) fn dot(bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    bra.iter().zip(ket).map(|(a, b)| a.conj() * b).sum()
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Spreads `k` over the index bits other than `lo` and `hi` (`lo < hi`).
#[inline]
fn insert_zero_bits(k: usize, lo: usize, hi: usize) -> usize {
    let low_mask = (1 << lo) - 1;
    let i = (k & low_mask) | ((k & !low_mask) << 1);
    let high_mask = (1 << hi) - 1;
    (i & high_mask) | ((i & !high_mask) << 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_layout() {
        let s = StateVector::zero(3).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        let s8 = StateVector::zero(8).unwrap();
        assert_eq!(s8.dim(), 256);
        assert!((s8.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_count_bounds() {
        assert!(matches!(StateVector::zero(2), Err(Error::Config(_))));
        assert!(matches!(StateVector::zero(15), Err(Error::Config(_))));
        assert!(StateVector::zero(14).is_ok());
    }

    #[test]
    fn rx_pi_flips_with_minus_i() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply_gate(&Gate::new(GateKind::Rx, &[0], 0).unwrap(), PI).unwrap();
        let a = s.amplitudes();
        assert!((a[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(a[0].norm() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_angle_is_identity() {
        let amps: Vec<_> = (0..8).map(|i| Complex64::new(i as f64, -0.5 * i as f64)).collect();
        let mut s = StateVector::from_amplitudes(3, amps.clone()).unwrap();
        for kind in [GateKind::Rx, GateKind::Rz] {
            s.apply_gate(&Gate::new(kind, &[1], 0).unwrap(), 0.0).unwrap();
        }
        for kind in [GateKind::Rxx, GateKind::Ryy, GateKind::Rzz] {
            s.apply_gate(&Gate::new(kind, &[2, 0], 0).unwrap(), 0.0).unwrap();
        }
        assert_eq!(s.amplitudes(), &amps[..]);
    }

    #[test]
    fn gate_validation() {
        assert!(matches!(Gate::new(GateKind::Rx, &[0, 1], 0), Err(Error::Structural(_))));
        assert!(matches!(Gate::new(GateKind::Rzz, &[1, 1], 0), Err(Error::Structural(_))));
        let mut s = StateVector::zero(3).unwrap();
        let g = Gate::new(GateKind::Rxx, &[0, 3], 0).unwrap();
        assert!(matches!(s.apply_gate(&g, 0.3), Err(Error::Structural(_))));
        assert_eq!(s, StateVector::zero(3).unwrap());
    }

    #[test]
    fn inner_products() {
        let a = StateVector::zero(3).unwrap();
        let b = StateVector::basis(3, 1).unwrap();
        assert_eq!(a.inner_product(&a).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(a.inner_product(&b).unwrap(), Complex64::new(0.0, 0.0));
        let c = StateVector::zero(4).unwrap();
        assert!(matches!(a.inner_product(&c), Err(Error::Structural(_))));
    }

    #[test]
    fn zero_bit_insertion_enumerates_complement() {
        let (lo, hi) = (1, 3);
        let got: Vec<usize> = (0..4).map(|k| insert_zero_bits(k, lo, hi)).collect();
        let want: Vec<usize> = (0..16).filter(|i| i & 0b1010 == 0).collect();
        assert_eq!(got, want);
    }
}
