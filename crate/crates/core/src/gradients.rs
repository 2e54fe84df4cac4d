//! Reverse-mode (adjoint) energy gradients and a central-difference oracle.

use num_complex::Complex64;

use crate::ansatz::Circuit;
use crate::error::{ensure, Error, Result};
use crate::hamiltonian::{pauli_overlap, PauliSum};
use crate::state::{dot, Gate, GateKind};

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyGradient {
    pub energy: f64,
    /// `∂⟨H⟩/∂θ_k`, indexed by parameter slot.
    pub d_theta: Vec<f64>,
}

fn check_register(circuit: &Circuit, h: &PauliSum) -> Result<()> {
    ensure!(
        circuit.n_qubits() == h.n_qubits(),
        Structural,
        "{}-qubit circuit against {}-qubit Hamiltonian",
        circuit.n_qubits(),
        h.n_qubits()
    );
    Ok(())
}

/// `⟨ψ(θ)|H|ψ(θ)⟩`.
pub fn energy(circuit: &Circuit, theta: &[f64], h: &PauliSum) -> Result<f64> {
    check_register(circuit, h)?;
    h.expectation(&circuit.evaluate(theta)?)
}

/// `⟨bra|G|ket⟩` for the Pauli generator of `gate`.
fn generator_overlap(gate: &Gate, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    let mask: usize = gate.qubits().iter().map(|q| 1usize << q).sum();
    let one = Complex64::new(1.0, 0.0);
    match gate.kind {
        GateKind::Rx | GateKind::Rxx => pauli_overlap(mask, 0, one, bra, ket),
        GateKind::Rz | GateKind::Rzz => pauli_overlap(0, mask, one, bra, ket),
        GateKind::Ryy => pauli_overlap(mask, mask, -one, bra, ket),
    }
}

/// Energy and full gradient from one forward and one backward sweep.
///
/// With `λ_k = U_{k+1}† ⋯ U_G† H|ψ⟩` and `ψ_k = U_k ⋯ U_1|0⟩`, the derivative
/// of `exp(−iθG/2)` gives `∂E/∂θ_k = Im⟨λ_k|G_k|ψ_k⟩`. Both vectors are walked
/// backwards by applying each gate at `−θ`, so memory stays at two states.
pub fn adjoint_gradient(circuit: &Circuit, theta: &[f64], h: &PauliSum) -> Result<EnergyGradient> {
    check_register(circuit, h)?;
    let mut psi = circuit.evaluate(theta)?;
    let mut costate = h.apply(&psi)?;
    let e = dot(psi.amplitudes(), costate.amplitudes());
    if e.im.abs() > 1e-8 {
        return Err(Error::Consistency(format!("energy has imaginary part {:e}", e.im)));
    }

    let mut d_theta = vec![0.0; circuit.n_params()];
    for gate in circuit.gates().iter().rev() {
        d_theta[gate.param_slot] = generator_overlap(gate, costate.amplitudes(), psi.amplitudes()).im;
        let back = -theta[gate.param_slot];
        psi.apply_rotation(gate.kind, gate.qubits(), back);
        costate.apply_rotation(gate.kind, gate.qubits(), back);
    }
    Ok(EnergyGradient { energy: e.re, d_theta })
}

/// `(E(θ + s e_k) − E(θ − s e_k)) / 2s` for every slot `k`.
pub fn finite_difference_gradient(
    circuit: &Circuit,
    theta: &[f64],
    h: &PauliSum,
    step: f64,
) -> Result<Vec<f64>> {
    ensure!(step > 0.0 && step.is_finite(), Usage, "finite-difference step must be positive, got {step}");
    check_register(circuit, h)?;
    circuit.check_theta(theta)?;
    let mut shifted = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            shifted[k] = theta[k] + step;
            let up = energy(circuit, &shifted, h)?;
            shifted[k] = theta[k] - step;
            let down = energy(circuit, &shifted, h)?;
            shifted[k] = theta[k];
            Ok((up - down) / (2.0 * step))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Pauli, PauliString};
    use std::f64::consts::FRAC_PI_2;

    fn rx_z() -> (Circuit, PauliSum) {
        let c = Circuit::new(3, vec![Gate::new(GateKind::Rx, &[0], 0).unwrap()], "rx").unwrap();
        let h = PauliSum::new(3, vec![PauliString::sparse(3, &[(0, Pauli::Z)], 1.0).unwrap()]).unwrap();
        (c, h)
    }

    #[test]
    fn single_rotation_analytic() {
        let (c, h) = rx_z();
        let g = adjoint_gradient(&c, &[0.0], &h).unwrap();
        assert!((g.energy - 1.0).abs() < 1e-15);
        assert!(g.d_theta[0].abs() < 1e-15);

        let g = adjoint_gradient(&c, &[FRAC_PI_2], &h).unwrap();
        assert!(g.energy.abs() < 1e-12);
        assert!((g.d_theta[0] + 1.0).abs() < 1e-12);

        let fd = finite_difference_gradient(&c, &[FRAC_PI_2], &h, 1e-5).unwrap();
        assert!((fd[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn flat_direction() {
        // RZ on |0⟩ only adds a global phase.
        let c = Circuit::new(3, vec![Gate::new(GateKind::Rz, &[1], 0).unwrap()], "rz").unwrap();
        let h = crate::hamiltonian::build_xxz(3, 1.0, 0.5).unwrap();
        let fd = finite_difference_gradient(&c, &[0.4], &h, FD_STEP).unwrap();
        assert!(fd[0].abs() < 1e-9);
        assert!(adjoint_gradient(&c, &[0.4], &h).unwrap().d_theta[0].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (c, h) = rx_z();
        assert!(matches!(finite_difference_gradient(&c, &[0.0], &h, 0.0), Err(Error::Usage(_))));
        assert!(matches!(adjoint_gradient(&c, &[0.0, 1.0], &h), Err(Error::Structural(_))));
        let h4 = crate::hamiltonian::build_xxz(4, 1.0, 0.0).unwrap();
        assert!(matches!(adjoint_gradient(&c, &[0.0], &h4), Err(Error::Structural(_))));
    }
}
