//! Evaluation of trained models against the exact solver.

use rayon::prelude::*;
use std::path::Path;

use crate::ansatz::Circuit;
use crate::encoder::Encoder;
use crate::error::{ensure, Error, Result};
use crate::hamiltonian::{phase_boundary_hc, phase_boundary_hs, GroundState, GroundStateCache, HamiltonianFamily};
use crate::state::StateVector;

/// Smallest `|E_exact|` accepted as a relative-error denominator.
pub const REL_ERR_FLOOR: f64 = 1e-6;

/// A trained encoder bound to its circuit and Hamiltonian family.
#[derive(Clone, Copy)]
pub struct Model<'a> {
    pub family: &'a HamiltonianFamily,
    pub circuit: &'a Circuit,
    pub encoder: &'a Encoder,
}

impl<'a> Model<'a> {
    pub fn new(family: &'a HamiltonianFamily, circuit: &'a Circuit, encoder: &'a Encoder) -> Self {
        Self { family, circuit, encoder }
    }

    /// Eval-mode circuit parameters at `point`.
    pub fn theta(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.encoder.predict(point)
    }

    pub fn state(&self, point: &[f64]) -> Result<StateVector> {
        self.circuit.evaluate(&self.theta(point)?)
    }

    /// `(⟨H⟩, ⟨H²⟩ − ⟨H⟩²)` of the predicted state at `point`.
    pub fn energy_and_variance(&self, point: &[f64]) -> Result<(f64, f64)> {
        self.family.hamiltonian(point)?.energy_and_variance(&self.state(point)?)
    }
}

/// `|E_pred − E_exact| / |E_exact|`.
pub fn relative_error(predicted: f64, exact: f64) -> Result<f64> {
    if exact.abs() < REL_ERR_FLOOR {
        return Err(Error::Domain(format!(
            "exact energy {exact:e} too close to zero for a relative error"
        )));
    }
    Ok((predicted - exact).abs() / exact.abs())
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner_product(b)?.norm_sqr())
}

/// Weight of `state` inside the (possibly degenerate) ground space.
pub fn ground_space_fidelity(state: &StateVector, ground: &GroundState) -> Result<f64> {
    ground
        .ground_space
        .iter()
        .map(|g| fidelity(g, state))
        .sum()
}

/// `Σ_k |θ_curr[k] − θ_prev[k]|`.
pub fn parameter_update_magnitude(theta_prev: &[f64], theta_curr: &[f64]) -> Result<f64> {
    ensure!(
        theta_prev.len() == theta_curr.len(),
        Structural,
        "parameter vectors of length {} and {}",
        theta_prev.len(),
        theta_curr.len()
    );
    Ok(theta_prev.iter().zip(theta_curr).map(|(a, b)| (b - a).abs()).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub point: Vec<f64>,
    pub e_pred: f64,
    pub e_exact: f64,
    pub rel_err: f64,
    pub fidelity: f64,
    pub variance: f64,
}

/// One record per test point, in input order.
pub fn evaluate_on_grid(model: &Model<'_>, points: &[Vec<f64>], exact: &GroundStateCache) -> Result<Vec<EvalRecord>> {
    points
        .par_iter()
        .map(|point| {
            let state = model.state(point)?;
            let (e_pred, variance) = model.family.hamiltonian(point)?.energy_and_variance(&state)?;
            let ground = exact.get(model.family, point)?;
            Ok(EvalRecord {
                point: point.clone(),
                e_pred,
                e_exact: ground.energy,
                rel_err: relative_error(e_pred, ground.energy)?,
                fidelity: ground_space_fidelity(&state, &ground)?,
                variance,
            })
        })
        .collect()
}

/// Writes `delta[,lambda],e_pred,e_exact,rel_err,fidelity,variance`, plus
/// `hs,hc` phase-boundary columns (evaluated at each Δ) when `boundaries`.
pub fn write_sweep_csv(
    records: &[EvalRecord],
    parameter_names: &[&str],
    boundaries: bool,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = parameter_names.to_vec();
    header.extend(["e_pred", "e_exact", "rel_err", "fidelity", "variance"]);
    if boundaries {
        header.extend(["hs", "hc"]);
    }
    w.write_record(&header)?;
    for r in records {
        let mut row: Vec<String> = r.point.iter().map(f64::to_string).collect();
        row.extend([r.e_pred, r.e_exact, r.rel_err, r.fidelity, r.variance].map(|x| x.to_string()));
        if boundaries {
            let delta = r.point[0];
            row.push(phase_boundary_hs(delta).to_string());
            row.push(phase_boundary_hc(delta).map_or_else(|_| "nan".to_string(), |v| v.to_string()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `θ_k(λ)` for every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterTable {
    pub points: Vec<Vec<f64>>,
    pub thetas: Vec<Vec<f64>>,
}

impl ParameterTable {
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.thetas.iter().map(|row| row[k]).collect()
    }

    /// Largest `|θ_k(i+1) − 2θ_k(i) + θ_k(i−1)|` over slots and interior rows.
    pub fn max_second_difference(&self) -> f64 {
        self.thetas
            .windows(3)
            .flat_map(|w| (0..w[0].len()).map(move |k| (w[2][k] - 2.0 * w[1][k] + w[0][k]).abs()))
            .fold(0.0, f64::max)
    }

    /// Columns: parameter names, `theta_k` for each slot, then `cos_k`.
    pub fn write_csv(&self, parameter_names: &[&str], path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let m = self.thetas.first().map_or(0, Vec::len);
        let mut header: Vec<String> = parameter_names.iter().map(|s| s.to_string()).collect();
        header.extend((0..m).map(|k| format!("theta_{k}")));
        header.extend((0..m).map(|k| format!("cos_{k}")));
        w.write_record(&header)?;
        for (point, theta) in self.points.iter().zip(&self.thetas) {
            let mut row: Vec<String> = point.iter().map(f64::to_string).collect();
            row.extend(theta.iter().map(f64::to_string));
            row.extend(theta.iter().map(|t| t.cos().to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn dump_circuit_parameters(encoder: &Encoder, grid: &[Vec<f64>]) -> Result<ParameterTable> {
    let thetas = grid.iter().map(|p| encoder.predict(p)).collect::<Result<_>>()?;
    Ok(ParameterTable { points: grid.to_vec(), thetas })
}

/// `count` equispaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// Cartesian product, first axis outermost.
pub fn grid2d(first: &[f64], second: &[f64]) -> Vec<Vec<f64>> {
    first
        .iter()
        .flat_map(|&a| second.iter().map(move |&b| vec![a, b]))
        .collect()
}

pub fn grid1d(values: &[f64]) -> Vec<Vec<f64>> {
    values.iter().map(|&v| vec![v]).collect()
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    }
}
