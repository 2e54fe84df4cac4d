//! Executes a resolved [`ExperimentConfig`] and writes its artifacts.

use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::active::{active_learn, write_rounds_csv, AcquisitionConfig};
use crate::ansatz::Circuit;
use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::hamiltonian::{GroundStateCache, HamiltonianFamily};
use crate::metrics::{dump_circuit_parameters, evaluate_on_grid, median, write_sweep_csv, EvalRecord, Model};
use crate::training::{
    convergence_rate_experiment, nn_vs_direct, train, write_convergence_csv, PairedRun, PairedSetup, TrainConfig,
    TrainOutcome,
};

use super::config::{grid_points, ExperimentConfig, ExperimentKind, ModelConfig};

pub const OUT_DIR_ENV: &str = "NNVQE_OUT_DIR";
pub const MANIFEST: &str = "manifest.toml";

/// `--out`, then the config's `out_dir`, then `$NNVQE_OUT_DIR/<name>`,
/// then `nnvqe-out/<name>`.
pub fn resolve_out_dir(config: &ExperimentConfig, cli: Option<&Path>) -> PathBuf {
    if let Some(dir) = cli {
        return dir.to_path_buf();
    }
    if !config.out_dir.is_empty() {
        return PathBuf::from(&config.out_dir);
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(base) if !base.is_empty() => PathBuf::from(base).join(&config.name),
        _ => PathBuf::from("nnvqe-out").join(&config.name),
    }
}

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parse(_) => 2,
        Error::Numerical { .. } => 3,
        _ => 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub out_dir: PathBuf,
    /// Paths relative to `out_dir`, in write order; the manifest is last.
    pub artifacts: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn path(&mut self, name: impl Into<String>) -> PathBuf {
        let name = name.into();
        let path = self.dir.join(&name);
        self.written.push(name);
        path
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    nnvqe_version: &'a str,
    seed: u64,
    artifacts: &'a [String],
    config: &'a ExperimentConfig,
}

pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut out = Outputs { dir: out_dir.to_path_buf(), written: Vec::new() };
    let exact = GroundStateCache::new();
    match config.kind {
        ExperimentKind::Sweep1d | ExperimentKind::Sweep2d | ExperimentKind::BaselineCompare => {
            run_sweeps(config, &exact, &mut out)?
        }
        ExperimentKind::ParamDump => run_param_dump(config, &mut out)?,
        ExperimentKind::ActiveLearn => run_active(config, &exact, &mut out)?,
        ExperimentKind::Speedup => run_speedup(config, &exact, &mut out)?,
        ExperimentKind::ConvergenceTable => run_convergence(config, &exact, &mut out)?,
    }

    out.written.push(MANIFEST.to_string());
    let manifest = Manifest {
        nnvqe_version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        artifacts: &out.written,
        config,
    };
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let body = toml::to_string(&manifest).expect("manifest always serializes");
    std::fs::write(out_dir.join(MANIFEST), format!("# created_unix = {stamp}\n{body}"))?;
    Ok(RunReport { out_dir: out_dir.to_path_buf(), artifacts: out.written })
}

struct Prepared {
    family: HamiltonianFamily,
    circuit: Circuit,
}

fn prepare(config: &ExperimentConfig, model: &ModelConfig) -> Result<Prepared> {
    Ok(Prepared { family: config.hamiltonian.family(model.n_qubits)?, circuit: model.circuit()? })
}

fn train_config(config: &ExperimentConfig, model: &ModelConfig, p: &Prepared) -> Result<TrainConfig> {
    Ok(TrainConfig {
        family: p.family,
        circuit: p.circuit.clone(),
        encoder: model.encoder_spec(p.family.dim(), p.circuit.n_params(), config.seed),
        points: grid_points(&config.train_grid)?,
        max_epochs: config.training.max_epochs,
        schedule: config.training.schedule,
        seed: config.seed,
    })
}

fn train_model(config: &ExperimentConfig, model: &ModelConfig, p: &Prepared, out: &mut Outputs) -> Result<TrainOutcome> {
    eprintln!("[{}] training {} ({} parameters)", config.name, model.label, p.circuit.n_params());
    let outcome = train(&train_config(config, model, p)?)?;
    outcome.history.write_csv(out.path(format!("history_{}.csv", model.label)))?;
    outcome.encoder.save(out.path(format!("encoder_{}.ckpt", model.label)))?;
    Ok(outcome)
}

fn sweep(config: &ExperimentConfig, model: &ModelConfig, p: &Prepared, encoder: &Encoder, exact: &GroundStateCache, out: &mut Outputs) -> Result<Vec<EvalRecord>> {
    eprintln!("[{}] evaluating {} on the test grid", config.name, model.label);
    let records = evaluate_on_grid(&Model::new(&p.family, &p.circuit, encoder), &grid_points(&config.test_grid)?, exact)?;
    write_sweep_csv(
        &records,
        p.family.parameter_names(),
        p.family.dim() == 2,
        out.path(format!("sweep_{}.csv", model.label)),
    )?;
    Ok(records)
}

fn summary_fields(records: &[EvalRecord]) -> [String; 3] {
    let errs: Vec<f64> = records.iter().map(|r| r.rel_err).collect();
    let max = errs.iter().copied().fold(0.0, f64::max);
    let mean_fidelity = records.iter().map(|r| r.fidelity).sum::<f64>() / records.len() as f64;
    [median(&errs).to_string(), max.to_string(), mean_fidelity.to_string()]
}

fn run_sweeps(config: &ExperimentConfig, exact: &GroundStateCache, out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::new();
    for model in &config.models {
        let p = prepare(config, model)?;
        let outcome = train_model(config, model, &p, out)?;
        let records = sweep(config, model, &p, &outcome.encoder, exact, out)?;
        let mut row = vec![
            model.label.clone(),
            model.encoder.to_string(),
            p.circuit.n_params().to_string(),
        ];
        row.extend(summary_fields(&records));
        rows.push(row);
    }
    let mut w = csv::Writer::from_path(out.path("summary.csv"))?;
    w.write_record(["label", "encoder", "n_params", "median_rel_err", "max_rel_err", "mean_fidelity"])?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn run_param_dump(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    for model in &config.models {
        let p = prepare(config, model)?;
        let outcome = train_model(config, model, &p, out)?;
        let table = dump_circuit_parameters(&outcome.encoder, &grid_points(&config.test_grid)?)?;
        table.write_csv(p.family.parameter_names(), out.path(format!("params_{}.csv", model.label)))?;
        std::fs::write(out.path(format!("circuit_{}.txt", model.label)), p.circuit.describe())?;
    }
    Ok(())
}

fn run_active(config: &ExperimentConfig, exact: &GroundStateCache, out: &mut Outputs) -> Result<()> {
    let mut w_rows = Vec::new();
    for model in &config.models {
        let p = prepare(config, model)?;
        let acquisition = AcquisitionConfig {
            pool: grid_points(&config.active.pool)?,
            mu: config.active.mu,
            threshold: config.active.threshold,
            max_points: config.active.max_points,
            warm_start: config.active.warm_start,
            test_points: grid_points(&config.test_grid)?,
            seed: config.seed,
        };
        eprintln!("[{}] active learning with {}", config.name, model.label);
        let outcome = active_learn(&acquisition, &train_config(config, model, &p)?, exact)?;
        write_rounds_csv(&outcome.rounds, out.path(format!("rounds_{}.csv", model.label)))?;
        outcome.encoder.save(out.path(format!("encoder_{}.ckpt", model.label)))?;
        let records = sweep(config, model, &p, &outcome.encoder, exact, out)?;
        let mut row = vec![
            model.label.clone(),
            outcome.selected.len().to_string(),
            outcome.reached_threshold.to_string(),
            outcome.pool_exhausted.to_string(),
        ];
        row.extend(summary_fields(&records));
        w_rows.push(row);
    }
    let mut w = csv::Writer::from_path(out.path("summary.csv"))?;
    w.write_record([
        "label",
        "selected",
        "reached_threshold",
        "pool_exhausted",
        "median_rel_err",
        "max_rel_err",
        "mean_fidelity",
    ])?;
    for row in w_rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn paired_setup(config: &ExperimentConfig, model: &ModelConfig) -> Result<PairedSetup> {
    let p = prepare(config, model)?;
    Ok(PairedSetup {
        family: p.family,
        circuit: p.circuit,
        hidden_dim: model.hidden_dim,
        dropout_rate: model.dropout,
        schedule: config.training.schedule,
        max_epochs: config.training.max_epochs,
    })
}

fn mean_std(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn run_speedup(config: &ExperimentConfig, exact: &GroundStateCache, out: &mut Outputs) -> Result<()> {
    use rayon::prelude::*;
    let mut summary = Vec::new();
    for model in &config.models {
        let setup = paired_setup(config, model)?;
        for &delta in &config.paired.deltas {
            eprintln!("[{}] {} at delta {delta}: {} paired runs", config.name, model.label, config.paired.trials);
            let runs = (0..config.paired.trials as u64)
                .into_par_iter()
                .map(|t| nn_vs_direct(&setup, &[delta], config.seed + t, exact))
                .collect::<Result<Vec<PairedRun>>>()?;
            let e0 = runs[0].exact_energy.abs();
            let mut w = csv::Writer::from_path(out.path(format!("speedup_{}_delta{delta}.csv", model.label)))?;
            w.write_record([
                "epoch",
                "nn_rel_err_mean",
                "nn_rel_err_std",
                "vqe_rel_err_mean",
                "vqe_rel_err_std",
                "nn_param_update_mean",
                "vqe_param_update_mean",
            ])?;
            for epoch in 0..setup.max_epochs {
                let rel = |cost: f64| (cost - runs[0].exact_energy).abs() / e0;
                let (nn_m, nn_s) = mean_std(runs.iter().map(|r| rel(r.nn.history.records[epoch].cost)));
                let (d_m, d_s) = mean_std(runs.iter().map(|r| rel(r.direct.history.records[epoch].cost)));
                let (nn_u, _) = mean_std(runs.iter().map(|r| r.nn.history.records[epoch].param_update));
                let (d_u, _) = mean_std(runs.iter().map(|r| r.direct.history.records[epoch].param_update));
                w.write_record([epoch.to_string(), nn_m.to_string(), nn_s.to_string(), d_m.to_string(), d_s.to_string(), nn_u.to_string(), d_u.to_string()])?;
            }
            w.flush()?;
            let nn_final: Vec<f64> = runs.iter().map(PairedRun::nn_relative_error).collect::<Result<_>>()?;
            let d_final: Vec<f64> = runs.iter().map(PairedRun::direct_relative_error).collect::<Result<_>>()?;
            let rate = |v: &[f64]| v.iter().filter(|&&e| e < config.paired.threshold).count() as f64 / v.len() as f64;
            summary.push([
                model.label.clone(),
                delta.to_string(),
                runs.len().to_string(),
                mean_std(nn_final.iter().copied()).0.to_string(),
                mean_std(d_final.iter().copied()).0.to_string(),
                rate(&nn_final).to_string(),
                rate(&d_final).to_string(),
            ]);
        }
    }
    let mut w = csv::Writer::from_path(out.path("summary.csv"))?;
    w.write_record(["label", "delta", "trials", "nn_final_rel_err", "vqe_final_rel_err", "nn_rate", "vqe_rate"])?;
    for row in summary {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn run_convergence(config: &ExperimentConfig, exact: &GroundStateCache, out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::new();
    for model in &config.models {
        eprintln!("[{}] convergence rates for {}", config.name, model.label);
        let setup = paired_setup(config, model)?;
        rows.extend(convergence_rate_experiment(
            &setup,
            &config.paired.deltas,
            config.paired.trials,
            config.paired.threshold,
            config.seed,
            exact,
        )?);
    }
    write_convergence_csv(&rows, out.path("convergence.csv"))
}
