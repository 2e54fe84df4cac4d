//! Circuit families: ladder hardware-efficient ansatz and MERA-style
//! expansion circuits, both as flat gate lists with one parameter per gate.

use std::fmt;

use crate::error::{ensure, Result};
use crate::state::{check_qubit_count, Gate, GateKind, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzFamily {
    Hea,
    Mera,
}

impl AnsatzFamily {
    pub fn build(self, n_qubits: usize, depth: usize) -> Result<Circuit> {
        match self {
            AnsatzFamily::Hea => build_hea(n_qubits, depth),
            AnsatzFamily::Mera => build_mera(n_qubits, depth),
        }
    }
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzFamily::Hea => "hea",
            AnsatzFamily::Mera => "mera",
        })
    }
}

/// Ordered gate list acting on `|0…0⟩`. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
    label: String,
}

impl Circuit {
    /// Validates qubit ranges and that every slot in `0..n_params` is used
    /// by exactly one gate.
    pub fn new(n_qubits: usize, gates: Vec<Gate>, label: impl Into<String>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let n_params = gates.len();
        let mut seen = vec![false; n_params];
        for g in &gates {
            g.check_fits(n_qubits)?;
            ensure!(g.param_slot < n_params, Structural, "slot {} out of range", g.param_slot);
            ensure!(!seen[g.param_slot], Structural, "slot {} shared by two gates", g.param_slot);
            seen[g.param_slot] = true;
        }
        Ok(Self { n_qubits, gates, n_params, label: label.into() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn check_theta(&self, theta: &[f64]) -> Result<()> {
        ensure!(
            theta.len() == self.n_params,
            Structural,
            "circuit has {} parameters, got {}",
            self.n_params,
            theta.len()
        );
        Ok(())
    }

    /// `U(θ)|0…0⟩`.
    pub fn evaluate(&self, theta: &[f64]) -> Result<StateVector> {
        self.check_theta(theta)?;
        let mut state = StateVector::zero(self.n_qubits)?;
        for g in &self.gates {
            state.apply_rotation(g.kind, g.qubits(), theta[g.param_slot]);
        }
        Ok(state)
    }

    /// One gate per line: index, kind, qubits, parameter slot.
    pub fn describe(&self) -> String {
        let mut out = format!(
            "# {} on {} qubits, {} gates, {} parameters\n",
            self.label,
            self.n_qubits,
            self.gates.len(),
            self.n_params
        );
        for (i, g) in self.gates.iter().enumerate() {
            out.push_str(&format!("{i:4} {g}\n"));
        }
        out
    }
}

struct Builder {
    gates: Vec<Gate>,
}

impl Builder {
    fn new() -> Self {
        Self { gates: Vec::new() }
    }

    fn push(&mut self, kind: GateKind, qubits: &[usize]) -> Result<()> {
        let slot = self.gates.len();
        self.gates.push(Gate::new(kind, qubits, slot)?);
        Ok(())
    }

    /// `Rx · Rz · Rx` on each qubit.
    fn opening_layer(&mut self, qubits: impl IntoIterator<Item = usize>) -> Result<()> {
        for q in qubits {
            for kind in [GateKind::Rx, GateKind::Rz, GateKind::Rx] {
                self.push(kind, &[q])?;
            }
        }
        Ok(())
    }

    /// `Rz · Rx` on each qubit (Rx acts first).
    fn single_layer(&mut self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            self.push(GateKind::Rx, &[q])?;
            self.push(GateKind::Rz, &[q])?;
        }
        Ok(())
    }

    /// Composite two-qubit rotation; `kinds` listed in application order.
    fn pair(&mut self, a: usize, b: usize, kinds: &[GateKind]) -> Result<()> {
        for &kind in kinds {
            self.push(kind, &[a, b])?;
        }
        Ok(())
    }
}

/// Ladder hardware-efficient ansatz with `3n + 5nD` parameters.
///
/// Opening `Rx·Rz·Rx` layer, then `depth` blocks of `Rz·Rx` singles followed
/// by `Ryy·Rxx·Rzz` on the periodic bonds `(i, i+1 mod n)`.
pub fn build_hea(n_qubits: usize, depth: usize) -> Result<Circuit> {
    check_qubit_count(n_qubits)?;
    ensure!(depth >= 1, Config, "HEA depth must be at least 1");
    let all: Vec<usize> = (0..n_qubits).collect();
    let mut b = Builder::new();
    b.opening_layer(all.iter().copied())?;
    for _ in 0..depth {
        b.single_layer(&all)?;
        for i in 0..n_qubits {
            b.pair(i, (i + 1) % n_qubits, &[GateKind::Rzz, GateKind::Rxx, GateKind::Ryy])?;
        }
    }
    Circuit::new(n_qubits, b.gates, format!("hea(n={n_qubits}, D={depth})"))
}

/// MERA-style expansion circuit.
///
/// All qubits start in `|0⟩` and receive the opening `Rx·Rz·Rx` layer. The
/// active register then doubles `2 → 4 → … → n`; at scale `m` the active
/// qubits are every `(n/m)`-th qubit, so freshly introduced qubits interleave
/// with the existing ones. Each scale applies `depth` blocks of `Rz·Rx`
/// singles on the active qubits followed by `Rzz·Rxx` brickwork on
/// neighbouring active pairs, even offsets before odd offsets.
pub fn build_mera(n_qubits: usize, depth: usize) -> Result<Circuit> {
    check_qubit_count(n_qubits)?;
    ensure!(
        n_qubits.is_power_of_two(),
        Config,
        "MERA needs a power-of-two qubit count, got {n_qubits}"
    );
    ensure!(depth >= 1, Config, "MERA depth must be at least 1");
    let mut b = Builder::new();
    b.opening_layer(0..n_qubits)?;
    let mut active = 2;
    while active <= n_qubits {
        let stride = n_qubits / active;
        let qubits: Vec<usize> = (0..active).map(|k| k * stride).collect();
        for _ in 0..depth {
            b.single_layer(&qubits)?;
            for start in [0, 1] {
                for k in (start..active - 1).step_by(2) {
                    b.pair(qubits[k], qubits[k + 1], &[GateKind::Rxx, GateKind::Rzz])?;
                }
            }
        }
        active *= 2;
    }
    Circuit::new(n_qubits, b.gates, format!("mera(n={n_qubits}, D={depth})"))
}
