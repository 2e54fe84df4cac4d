//! Joint pre-training of an encoder over a set of Hamiltonian parameter
//! points, with Adam and a step-decay learning rate. One epoch is one
//! full-batch gradient evaluation followed by one Adam update.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::ansatz::Circuit;
use crate::encoder::{DropoutKey, Encoder, EncoderSpec, Mode};
use crate::error::{ensure, Error, Result};
use crate::gradients::adjoint_gradient;
use crate::hamiltonian::{GroundStateCache, HamiltonianFamily, PauliSum};
use crate::metrics::{parameter_update_magnitude, relative_error};

/// `rate(step) = initial · factor^⌊step / interval⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrSchedule {
    pub initial: f64,
    pub factor: f64,
    pub interval: usize,
}

impl LrSchedule {
    pub fn constant(rate: f64) -> Self {
        Self { initial: rate, factor: 1.0, interval: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.initial > 0.0 && self.initial.is_finite(), Config, "learning rate must be positive");
        ensure!(
            self.factor > 0.0 && self.factor <= 1.0,
            Config,
            "decay factor must lie in (0, 1], got {}",
            self.factor
        );
        ensure!(self.interval >= 1, Config, "decay interval must be at least 1");
        Ok(())
    }

    pub fn rate(&self, step: usize) -> f64 {
        let decays = (step / self.interval) as i32;
        self.initial * self.factor.powi(decays)
    }
}

/// Adam moments with bias correction.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self { m: vec![0.0; len], v: vec![0.0; len], t: 0, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }

    /// One update of `weights` against `grad`.
    pub fn step(&mut self, weights: &mut [f64], grad: &[f64], rate: f64) -> Result<()> {
        ensure!(
            weights.len() == self.m.len() && grad.len() == self.m.len(),
            Structural,
            "Adam state of length {} given weights {} and gradient {}",
            self.m.len(),
            weights.len(),
            grad.len()
        );
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (((w, g), m), v) in weights.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *w -= rate * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub family: HamiltonianFamily,
    pub circuit: Circuit,
    pub encoder: EncoderSpec,
    /// Training points `λ̃_i`, each of the family's dimension.
    pub points: Vec<Vec<f64>>,
    pub max_epochs: usize,
    pub schedule: LrSchedule,
    /// Seeds the dropout streams.
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.schedule.validate()?;
        ensure!(self.max_epochs >= 1, Usage, "max epochs must be at least 1");
        ensure!(!self.points.is_empty(), Usage, "training set is empty");
        ensure!(
            self.family.n_qubits == self.circuit.n_qubits(),
            Config,
            "{}-qubit family with a {}-qubit circuit",
            self.family.n_qubits,
            self.circuit.n_qubits()
        );
        ensure!(
            self.encoder.input_dim == self.family.dim(),
            Config,
            "encoder input {} does not match {} Hamiltonian parameters",
            self.encoder.input_dim,
            self.family.dim()
        );
        ensure!(
            self.encoder.output_dim == self.circuit.n_params(),
            Config,
            "encoder output {} does not match {} circuit parameters",
            self.encoder.output_dim,
            self.circuit.n_params()
        );
        for p in &self.points {
            ensure!(p.len() == self.family.dim(), Config, "training point {p:?} has wrong dimension");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Training-mode cost at the start of the epoch.
    pub cost: f64,
    pub lr: f64,
    /// `Σ_k |θ_k(after) − θ_k(before)|` at the probe point, eval mode.
    pub param_update: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["epoch", "cost", "lr", "param_update"])?;
        for r in &self.records {
            w.write_record([r.epoch.to_string(), r.cost.to_string(), r.lr.to_string(), r.param_update.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub encoder: Encoder,
    pub history: TrainHistory,
}

/// A validated configuration with its Hamiltonians built once.
pub struct Trainer<'a> {
    config: &'a TrainConfig,
    hamiltonians: Vec<PauliSum>,
}

impl<'a> Trainer<'a> {
    pub fn new(config: &'a TrainConfig) -> Result<Self> {
        config.validate()?;
        let hamiltonians = config
            .points
            .iter()
            .map(|p| config.family.hamiltonian(p))
            .collect::<Result<_>>()?;
        Ok(Self { config, hamiltonians })
    }

    pub fn hamiltonians(&self) -> &[PauliSum] {
        &self.hamiltonians
    }

    /// Summed training-mode cost and `∂C/∂φ` over `subset` (indices into the
    /// training points). Per-point terms are reduced in ascending index order.
    pub fn cost_and_grad(&self, encoder: &Encoder, subset: &[usize], epoch: usize) -> Result<(f64, Vec<f64>)> {
        ensure!(!subset.is_empty(), Usage, "cost over an empty point set");
        let mut order = subset.to_vec();
        order.sort_unstable();
        order.dedup();
        if let Some(&bad) = order.iter().find(|&&i| i >= self.hamiltonians.len()) {
            return Err(Error::Usage(format!("point index {bad} out of range")));
        }
        let terms = order
            .par_iter()
            .map(|&i| {
                let key = DropoutKey { seed: self.config.seed, point: i, epoch };
                let (theta, cache) = encoder.forward(&self.config.points[i], Mode::Train(key))?;
                let grad = adjoint_gradient(&self.config.circuit, &theta, &self.hamiltonians[i])?;
                let cache = cache.expect("training forward always caches");
                Ok((grad.energy, encoder.backward(&cache, &grad.d_theta)?))
            })
            .collect::<Result<Vec<(f64, Vec<f64>)>>>()?;

        let mut cost = 0.0;
        let mut d_phi = vec![0.0; encoder.weights().len()];
        for (e, d) in terms {
            cost += e;
            d_phi.iter_mut().zip(d).for_each(|(acc, x)| *acc += x);
        }
        Ok((cost, d_phi))
    }

    /// Runs `max_epochs` full-batch epochs starting from `encoder`.
    pub fn run(&self, mut encoder: Encoder) -> Result<TrainOutcome> {
        ensure!(
            encoder.spec().n_weights() == self.config.encoder.n_weights()
                && encoder.spec().kind == self.config.encoder.kind,
            Config,
            "starting encoder does not match the configured encoder"
        );
        let all: Vec<usize> = (0..self.hamiltonians.len()).collect();
        let probe = &self.config.points[0];
        let mut adam = AdamState::new(encoder.weights().len());
        let mut history = TrainHistory::default();
        let mut theta_before = encoder.predict(probe)?;
        for epoch in 0..self.config.max_epochs {
            let (cost, d_phi) = self.cost_and_grad(&encoder, &all, epoch)?;
            if !cost.is_finite() || d_phi.iter().any(|g| !g.is_finite()) {
                return Err(Error::Numerical { epoch, detail: format!("cost {cost}") });
            }
            let lr = self.config.schedule.rate(epoch);
            adam.step(encoder.weights_mut(), &d_phi, lr)?;
            let theta_after = encoder.predict(probe)?;
            let param_update = parameter_update_magnitude(&theta_before, &theta_after)?;
            theta_before = theta_after;
            history.records.push(EpochRecord { epoch, cost, lr, param_update });
        }
        Ok(TrainOutcome { encoder, history })
    }

    /// Eval-mode energy of the trained model at training point `index`.
    pub fn eval_energy(&self, encoder: &Encoder, index: usize) -> Result<f64> {
        let theta = encoder.predict(&self.config.points[index])?;
        self.hamiltonians[index].expectation(&self.config.circuit.evaluate(&theta)?)
    }
}

/// Cost and encoder gradient over `subset` (ascending index order).
pub fn cost_and_grad(config: &TrainConfig, encoder: &Encoder, subset: &[usize], epoch: usize) -> Result<(f64, Vec<f64>)> {
    Trainer::new(config)?.cost_and_grad(encoder, subset, epoch)
}

/// Trains a freshly initialized encoder.
pub fn train(config: &TrainConfig) -> Result<TrainOutcome> {
    let encoder = Encoder::init(config.encoder.clone())?;
    Trainer::new(config)?.run(encoder)
}

/// Continues training from existing weights.
pub fn train_from(config: &TrainConfig, encoder: Encoder) -> Result<TrainOutcome> {
    Trainer::new(config)?.run(encoder)
}

/// Shared settings of an NN-encoded run and its plain-VQE twin.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedSetup {
    pub family: HamiltonianFamily,
    pub circuit: Circuit,
    pub hidden_dim: usize,
    pub dropout_rate: f64,
    pub schedule: LrSchedule,
    pub max_epochs: usize,
}

#[derive(Clone, Debug)]
pub struct PairedRun {
    pub seed: u64,
    pub exact_energy: f64,
    pub nn: TrainOutcome,
    pub direct: TrainOutcome,
    pub nn_energy: f64,
    pub direct_energy: f64,
}

impl PairedRun {
    pub fn nn_relative_error(&self) -> Result<f64> {
        relative_error(self.nn_energy, self.exact_energy)
    }

    pub fn direct_relative_error(&self) -> Result<f64> {
        relative_error(self.direct_energy, self.exact_energy)
    }
}

/// Trains an MLP encoder and a plain VQE on the single point `point`.
///
/// The plain VQE starts from the MLP's initial eval-mode output so both runs
/// share their initial circuit parameters.
pub fn nn_vs_direct(setup: &PairedSetup, point: &[f64], seed: u64, exact: &GroundStateCache) -> Result<PairedRun> {
    let m = setup.circuit.n_params();
    let p = setup.family.dim();
    let nn_spec = EncoderSpec::mlp(p, setup.hidden_dim, m, setup.dropout_rate, seed);
    let nn_init = Encoder::init(nn_spec.clone())?;
    let direct_spec = EncoderSpec::direct(p, m, seed);
    let direct_init = Encoder::from_weights(direct_spec.clone(), nn_init.predict(point)?)?;

    let config = |encoder: EncoderSpec| TrainConfig {
        family: setup.family,
        circuit: setup.circuit.clone(),
        encoder,
        points: vec![point.to_vec()],
        max_epochs: setup.max_epochs,
        schedule: setup.schedule,
        seed,
    };
    let nn_config = config(nn_spec);
    let direct_config = config(direct_spec);
    let nn_trainer = Trainer::new(&nn_config)?;
    let direct_trainer = Trainer::new(&direct_config)?;
    let nn = nn_trainer.run(nn_init)?;
    let direct = direct_trainer.run(direct_init)?;
    let nn_energy = nn_trainer.eval_energy(&nn.encoder, 0)?;
    let direct_energy = direct_trainer.eval_energy(&direct.encoder, 0)?;
    let exact_energy = exact.get(&setup.family, point)?.energy;
    Ok(PairedRun { seed, exact_energy, nn, direct, nn_energy, direct_energy })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n_qubits: usize,
    pub delta: f64,
    pub trials: usize,
    pub nn_converged: usize,
    pub direct_converged: usize,
}

impl ConvergenceRow {
    pub fn nn_rate(&self) -> f64 {
        self.nn_converged as f64 / self.trials as f64
    }

    pub fn direct_rate(&self) -> f64 {
        self.direct_converged as f64 / self.trials as f64
    }
}

/// Fraction of seeds whose final relative error falls strictly below
/// `threshold`, for the NN encoder and for plain VQE, at each `Δ`.
///
/// Trial `t` uses seed `base_seed + t`.
pub fn convergence_rate_experiment(
    setup: &PairedSetup,
    deltas: &[f64],
    trials: usize,
    threshold: f64,
    base_seed: u64,
    exact: &GroundStateCache,
) -> Result<Vec<ConvergenceRow>> {
    ensure!(trials >= 1, Usage, "at least one trial is required");
    ensure!(setup.family.dim() == 1, Config, "convergence experiment varies a single parameter");
    deltas
        .iter()
        .map(|&delta| {
            let runs = (0..trials as u64)
                .into_par_iter()
                .map(|t| nn_vs_direct(setup, &[delta], base_seed + t, exact))
                .collect::<Result<Vec<_>>>()?;
            let mut row = ConvergenceRow {
                n_qubits: setup.family.n_qubits,
                delta,
                trials,
                nn_converged: 0,
                direct_converged: 0,
            };
            for run in &runs {
                row.nn_converged += usize::from(run.nn_relative_error()? < threshold);
                row.direct_converged += usize::from(run.direct_relative_error()? < threshold);
            }
            Ok(row)
        })
        .collect()
}

pub fn write_convergence_csv(rows: &[ConvergenceRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "delta", "trials", "nn_rate", "vqe_rate"])?;
    for r in rows {
        w.write_record([
            r.n_qubits.to_string(),
            r.delta.to_string(),
            r.trials.to_string(),
            r.nn_rate().to_string(),
            r.direct_rate().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
