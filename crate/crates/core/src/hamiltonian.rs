//! Pauli-sum Hamiltonians, exact expectation values and the dense
//! ground-state solver used as the reference for every relative error.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{ensure, Error, Result};
use crate::state::{check_qubit_count, dot, StateVector, MAX_QUBITS};

/// Largest connected block the dense solver will diagonalize.
pub const MAX_DENSE_BLOCK: usize = 4096;

/// Eigenvalues within this distance of the minimum span the ground space.
pub const DEGENERACY_TOL: f64 = 1e-8;

const SPARSE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A real-weighted tensor product of single-qubit Paulis.
///
/// The action on a basis state is `P|b⟩ = i^{#Y} (−1)^{|b ∧ z|} |b ⊕ x⟩`
/// where `x` marks X/Y positions and `z` marks Z/Y positions.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    ops: Vec<Pauli>,
    coefficient: f64,
    x_mask: usize,
    z_mask: usize,
    y_phase: Complex64,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>, coefficient: f64) -> Result<Self> {
        ensure!(coefficient.is_finite(), Config, "non-finite Pauli coefficient {coefficient}");
        let (mut x_mask, mut z_mask, mut n_y) = (0usize, 0usize, 0u32);
        for (q, op) in ops.iter().enumerate() {
            match op {
                Pauli::I => {}
                Pauli::X => x_mask |= 1 << q,
                Pauli::Z => z_mask |= 1 << q,
                Pauli::Y => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                    n_y += 1;
                }
            }
        }
        let y_phase = Complex64::new(0.0, 1.0).powu(n_y);
        Ok(Self { ops, coefficient, x_mask, z_mask, y_phase })
    }

    /// Identity on `n` qubits except `ops` at the listed positions.
    pub fn sparse(n: usize, ops: &[(usize, Pauli)], coefficient: f64) -> Result<Self> {
        let mut full = vec![Pauli::I; n];
        for &(q, op) in ops {
            ensure!(q < n, Structural, "Pauli on qubit {q} of a {n}-qubit string");
            full[q] = op;
        }
        Self::new(full, coefficient)
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }

    #[inline]
    fn phase(&self, b: usize) -> Complex64 {
        if (b & self.z_mask).count_ones().is_multiple_of(2) {
            self.y_phase
        } else {
            -self.y_phase
        }
    }

    /// `⟨bra|P|ket⟩` without the coefficient.
    pub(crate) fn overlap(&self, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
        pauli_overlap(self.x_mask, self.z_mask, self.y_phase, bra, ket)
    }

    /// `out += weight · P · ket`.
    pub(crate) fn accumulate(&self, weight: f64, ket: &[Complex64], out: &mut [Complex64]) {
        for (b, v) in ket.iter().enumerate() {
            out[b ^ self.x_mask] += self.phase(b) * (weight * v);
        }
    }
}

/// `⟨bra|P|ket⟩` for the Pauli product described by its masks.
pub(crate) fn pauli_overlap(
    x_mask: usize,
    z_mask: usize,
    y_phase: Complex64,
    bra: &[Complex64],
    ket: &[Complex64],
) -> Complex64 {
    let mut even = Complex64::new(0.0, 0.0);
    let mut odd = Complex64::new(0.0, 0.0);
    for (b, v) in ket.iter().enumerate() {
        let t = bra[b ^ x_mask].conj() * v;
        if (b & z_mask).count_ones().is_multiple_of(2) {
            even += t;
        } else {
            odd += t;
        }
    }
    y_phase * (even - odd)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+} ", self.coefficient)?;
        for op in &self.ops {
            write!(f, "{}", op.symbol())?;
        }
        Ok(())
    }
}

/// Weighted sum of Pauli strings over a common register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.n_qubits() != n_qubits) {
            return Err(Error::Structural(format!(
                "term on {} qubits in a {n_qubits}-qubit sum",
                t.n_qubits()
            )));
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// Concatenation of the two term lists.
    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        ensure!(self.n_qubits == other.n_qubits, Structural, "adding sums on different registers");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PauliSum { n_qubits: self.n_qubits, terms })
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        ensure!(
            state.n_qubits() == self.n_qubits,
            Structural,
            "{}-qubit state against {}-qubit Hamiltonian",
            state.n_qubits(),
            self.n_qubits
        );
        Ok(())
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        self.check_state(state)?;
        let amps = state.amplitudes();
        let value: Complex64 = self
            .terms
            .iter()
            .map(|t| t.coefficient * t.overlap(amps, amps))
            .sum();
        real_part(value)
    }

    /// `H|ψ⟩`, unnormalized.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_state(state)?;
        let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
        for t in &self.terms {
            t.accumulate(t.coefficient, state.amplitudes(), &mut out);
        }
        StateVector::from_amplitudes(self.n_qubits, out)
    }

    /// `⟨H²⟩ − ⟨H⟩²` for a normalized state, clamped at zero.
    pub fn variance(&self, state: &StateVector) -> Result<f64> {
        Ok(self.energy_and_variance(state)?.1)
    }

    pub fn energy_and_variance(&self, state: &StateVector) -> Result<(f64, f64)> {
        let h_psi = self.apply(state)?;
        let energy = real_part(dot(state.amplitudes(), h_psi.amplitudes()))?;
        let second = h_psi.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>();
        Ok((energy, (second - energy * energy).max(0.0)))
    }

    /// Minimal eigenpair(s) by dense diagonalization of each connected block.
    pub fn exact_ground_state(&self) -> Result<GroundState> {
        exact_ground_state(self)
    }
}

fn real_part(value: Complex64) -> Result<f64> {
    if value.im.abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "expectation value has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Periodic XXZ chain: `Σ (XᵢXᵢ₊₁ + YᵢYᵢ₊₁ + Δ ZᵢZᵢ₊₁) + λ Σ Zᵢ`.
///
/// Terms are ordered bond by bond (XX, YY, ZZ) followed by the field terms;
/// zero coefficients are kept.
pub fn build_xxz(n: usize, delta: f64, lambda: f64) -> Result<PauliSum> {
    ensure!(n >= 3, Config, "periodic XXZ chain needs at least 3 sites, got {n}");
    let mut terms = Vec::with_capacity(4 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        for (op, coeff) in [(Pauli::X, 1.0), (Pauli::Y, 1.0), (Pauli::Z, delta)] {
            terms.push(PauliString::sparse(n, &[(i, op), (j, op)], coeff)?);
        }
    }
    for i in 0..n {
        terms.push(PauliString::sparse(n, &[(i, Pauli::Z)], lambda)?);
    }
    PauliSum::new(n, terms)
}

/// Exact minimum of the spectrum together with an orthonormal basis of the
/// ground space.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    /// First ground-space vector.
    pub state: StateVector,
    /// All eigenvectors with eigenvalue within [`DEGENERACY_TOL`] of `energy`.
    pub ground_space: Vec<StateVector>,
}

impl GroundState {
    pub fn degeneracy(&self) -> usize {
        self.ground_space.len()
    }
}

/// Dense exact diagonalization.
///
/// The Hamiltonian is first split into the connected components of its
/// sparse basis-state graph (e.g. magnetization sectors of the XXZ chain),
/// then each block is diagonalized densely. Only blocks whose lowest
/// eigenvalue reaches the ground energy have eigenvectors computed.
pub fn exact_ground_state(h: &PauliSum) -> Result<GroundState> {
    let n = h.n_qubits;
    ensure!(n <= MAX_QUBITS, Resource, "exact solver limited to {MAX_QUBITS} qubits, got {n}");
    check_qubit_count(n)?;
    let dim = 1usize << n;

    // Group terms by flip pattern: H[b ⊕ x, b] = Σ_{t: x_t = x} c_t phase_t(b).
    let mut flips: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for t in &h.terms {
        let column = match flips.iter_mut().find(|(x, _)| *x == t.x_mask) {
            Some((_, col)) => col,
            None => {
                flips.push((t.x_mask, vec![Complex64::new(0.0, 0.0); dim]));
                &mut flips.last_mut().expect("just pushed").1
            }
        };
        for (b, v) in column.iter_mut().enumerate() {
            *v += t.coefficient * t.phase(b);
        }
    }

    let mut components = DisjointSets::new(dim);
    for (x, col) in &flips {
        if *x == 0 {
            continue;
        }
        for (b, v) in col.iter().enumerate() {
            if v.norm() > SPARSE_TOL {
                components.union(b, b ^ x);
            }
        }
    }
    let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
    for b in 0..dim {
        blocks.entry(components.find(b)).or_default().push(b);
    }
    let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    blocks.sort_by_key(|members| members[0]);

    if let Some(big) = blocks.iter().find(|m| m.len() > MAX_DENSE_BLOCK) {
        return Err(Error::Resource(format!(
            "connected block of size {} exceeds dense limit {MAX_DENSE_BLOCK}",
            big.len()
        )));
    }
    let is_real = flips.iter().all(|(_, col)| col.iter().all(|v| v.im.abs() <= SPARSE_TOL));

    let mut block_minima = Vec::with_capacity(blocks.len());
    for members in &blocks {
        let lowest = if is_real {
            let m = dense_block(members, &flips, |v| v.re);
            m.symmetric_eigenvalues().min()
        } else {
            let m = dense_block(members, &flips, |v| v);
            m.symmetric_eigenvalues().min()
        };
        block_minima.push(lowest);
    }
    let energy = block_minima.iter().copied().fold(f64::INFINITY, f64::min);

    let mut ground_space = Vec::new();
    for (members, &lowest) in blocks.iter().zip(&block_minima) {
        if lowest > energy + DEGENERACY_TOL {
            continue;
        }
        let vectors: Vec<Vec<Complex64>> = if is_real {
            let eig = SymmetricEigen::new(dense_block(members, &flips, |v| v.re));
            low_columns(&eig.eigenvalues, energy, |k| {
                eig.eigenvectors.column(k).iter().map(|&r| Complex64::new(r, 0.0)).collect()
            })
        } else {
            let eig = SymmetricEigen::new(dense_block(members, &flips, |v| v));
            low_columns(&eig.eigenvalues, energy, |k| eig.eigenvectors.column(k).iter().copied().collect())
        };
        for local in vectors {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            for (&b, a) in members.iter().zip(local) {
                amps[b] = a;
            }
            let mut v = StateVector::from_amplitudes(n, amps)?;
            v.normalize();
            ground_space.push(v);
        }
    }
    let state = ground_space
        .first()
        .cloned()
        .ok_or_else(|| Error::Consistency("dense solver produced no ground vector".into()))?;
    Ok(GroundState { energy, state, ground_space })
}

fn dense_block<T, F>(members: &[usize], flips: &[(usize, Vec<Complex64>)], convert: F) -> DMatrix<T>
where
    T: nalgebra::Scalar + num_traits::Zero + std::ops::AddAssign,
    F: Fn(Complex64) -> T,
{
    let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let k = members.len();
    let mut m = DMatrix::<T>::from_element(k, k, T::zero());
    for (col, &b) in members.iter().enumerate() {
        for (x, values) in flips {
            let v = values[b];
            if v.norm() <= SPARSE_TOL {
                continue;
            }
            if let Some(&row) = local.get(&(b ^ x)) {
                m[(row, col)] += convert(v);
            }
        }
    }
    m
}

fn low_columns<F>(eigenvalues: &nalgebra::DVector<f64>, energy: f64, column: F) -> Vec<Vec<Complex64>>
where
    F: Fn(usize) -> Vec<Complex64>,
{
    let mut order: Vec<usize> = (0..eigenvalues.len())
        .filter(|&k| eigenvalues[k] <= energy + DEGENERACY_TOL)
        .collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    order.into_iter().map(column).collect()
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(size: usize) -> Self {
        Self { parent: (0..size).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Ferromagnetic saturation line `hs = d(1 + Δ)` with `d = 1`.
pub fn phase_boundary_hs(delta: f64) -> f64 {
    1.0 + delta
}

/// Antiferromagnetic gap line
/// `hc = (π sinh γ / γ) Σₙ sech(π²(1 + 2n) / (2γ))`, `γ = arccosh Δ`.
///
/// Defined for `Δ ≥ 1`; `Δ = 1` gives 0 by continuity.
pub fn phase_boundary_hc(delta: f64) -> Result<f64> {
    if delta.is_nan() || delta < 1.0 {
        return Err(Error::Domain(format!("hc requires delta >= 1, got {delta}")));
    }
    if delta == 1.0 {
        return Ok(0.0);
    }
    let gamma = delta.acosh();
    let term = |n: i64| {
        let arg = PI * PI * (1.0 + 2.0 * n as f64) / (2.0 * gamma);
        1.0 / arg.cosh()
    };
    let mut sum = term(0);
    let mut window = 0i64;
    loop {
        window += 1;
        let (up, down) = (term(window), term(-window));
        sum += up + down;
        if (up.abs() < 1e-13 && down.abs() < 1e-13) || window > 1_000_000 {
            break;
        }
    }
    Ok(PI * gamma.sinh() / gamma * sum)
}

/// Named parameterization of a Hamiltonian family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyKind {
    /// Anisotropy `Δ` varies, field fixed.
    XxzAnisotropy { field: f64 },
    /// Both `Δ` and the field `λ` vary.
    XxzAnisotropyField,
}

/// Maps a parameter point `λ` (of dimension `p`) to a concrete Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianFamily {
    pub n_qubits: usize,
    pub kind: FamilyKind,
}

impl HamiltonianFamily {
    pub fn xxz_delta(n_qubits: usize, field: f64) -> Self {
        Self { n_qubits, kind: FamilyKind::XxzAnisotropy { field } }
    }

    pub fn xxz_delta_field(n_qubits: usize) -> Self {
        Self { n_qubits, kind: FamilyKind::XxzAnisotropyField }
    }

    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self.kind {
            FamilyKind::XxzAnisotropy { .. } => &["delta"],
            FamilyKind::XxzAnisotropyField => &["delta", "lambda"],
        }
    }

    pub fn dim(&self) -> usize {
        self.parameter_names().len()
    }

    /// `(Δ, λ)` for a parameter point.
    pub fn xxz_parameters(&self, point: &[f64]) -> Result<(f64, f64)> {
        ensure!(
            point.len() == self.dim(),
            Structural,
            "parameter point of length {} for a {}-parameter family",
            point.len(),
            self.dim()
        );
        Ok(match self.kind {
            FamilyKind::XxzAnisotropy { field } => (point[0], field),
            FamilyKind::XxzAnisotropyField => (point[0], point[1]),
        })
    }

    pub fn hamiltonian(&self, point: &[f64]) -> Result<PauliSum> {
        let (delta, lambda) = self.xxz_parameters(point)?;
        build_xxz(self.n_qubits, delta, lambda)
    }
}

/// Ground states memoized per `(n, Δ, λ)`.
#[derive(Default)]
pub struct GroundStateCache {
    entries: Mutex<HashMap<(usize, u64, u64), Arc<GroundState>>>,
}

impl GroundStateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, family: &HamiltonianFamily, point: &[f64]) -> Result<Arc<GroundState>> {
        let (delta, lambda) = family.xxz_parameters(point)?;
        let key = (family.n_qubits, delta.to_bits(), lambda.to_bits());
        if let Some(hit) = self.entries.lock().expect("cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let solved = Arc::new(exact_ground_state(&build_xxz(family.n_qubits, delta, lambda)?)?);
        self.entries
            .lock()
            .expect("cache poisoned")
            .insert(key, Arc::clone(&solved));
        Ok(solved)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
