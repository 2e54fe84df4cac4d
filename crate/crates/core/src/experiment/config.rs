//! Experiment configuration files.
//!
//! A config names its `kind` (or a `preset`); every field it leaves out is
//! taken from that kind's built-in preset, so a minimal file is one line.
//! Keys that the schema does not know are rejected with their line number.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::ansatz::{AnsatzFamily, Circuit};
use crate::encoder::{EncoderKind, EncoderSpec};
use crate::error::{ensure, Error, Result};
use crate::hamiltonian::HamiltonianFamily;
use crate::metrics::{grid1d, grid2d, linspace};
use crate::training::LrSchedule;

use super::presets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Sweep1d,
    Sweep2d,
    ActiveLearn,
    Speedup,
    ConvergenceTable,
    ParamDump,
    BaselineCompare,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Sweep1d,
        ExperimentKind::Sweep2d,
        ExperimentKind::ActiveLearn,
        ExperimentKind::Speedup,
        ExperimentKind::ConvergenceTable,
        ExperimentKind::ParamDump,
        ExperimentKind::BaselineCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Sweep1d => "sweep1d",
            ExperimentKind::Sweep2d => "sweep2d",
            ExperimentKind::ActiveLearn => "active_learn",
            ExperimentKind::Speedup => "speedup",
            ExperimentKind::ConvergenceTable => "convergence_table",
            ExperimentKind::ParamDump => "param_dump",
            ExperimentKind::BaselineCompare => "baseline_compare",
        }
    }

    /// Preset supplying this kind's defaults.
    pub fn default_preset(self) -> &'static str {
        match self {
            ExperimentKind::Sweep1d => "fig2",
            ExperimentKind::Sweep2d => "fig5",
            ExperimentKind::ActiveLearn => "fig3",
            ExperimentKind::Speedup => "fig4",
            ExperimentKind::ConvergenceTable => "table_s1",
            ExperimentKind::ParamDump => "fig_s7",
            ExperimentKind::BaselineCompare => "fig_s6",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    /// `["delta"]` or `["delta", "lambda"]`.
    pub parameters: Vec<String>,
    /// Field strength when only `delta` varies.
    pub field: f64,
}

impl HamiltonianConfig {
    pub fn family(&self, n_qubits: usize) -> Result<HamiltonianFamily> {
        match self.parameters.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["delta"] => Ok(HamiltonianFamily::xxz_delta(n_qubits, self.field)),
            ["delta", "lambda"] => Ok(HamiltonianFamily::xxz_delta_field(n_qubits)),
            other => Err(Error::Config(format!(
                "hamiltonian.parameters must be [\"delta\"] or [\"delta\", \"lambda\"], got {other:?}"
            ))),
        }
    }
}

/// One circuit + encoder combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// File-name stem for this model's artifacts.
    pub label: String,
    pub n_qubits: usize,
    pub ansatz: AnsatzFamily,
    pub depth: usize,
    pub encoder: EncoderKind,
    pub hidden_dim: usize,
    pub dropout: f64,
}

impl ModelConfig {
    pub fn circuit(&self) -> Result<Circuit> {
        self.ansatz.build(self.n_qubits, self.depth)
    }

    pub fn encoder_spec(&self, input_dim: usize, output_dim: usize, seed: u64) -> EncoderSpec {
        match self.encoder {
            EncoderKind::Mlp => EncoderSpec::mlp(input_dim, self.hidden_dim, output_dim, self.dropout, seed),
            EncoderKind::Affine => EncoderSpec::affine(input_dim, output_dim, seed),
            EncoderKind::Direct => EncoderSpec::direct(input_dim, output_dim, seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

/// Cartesian grid, one axis per Hamiltonian parameter.
pub fn grid_points(axes: &[Axis]) -> Result<Vec<Vec<f64>>> {
    ensure!(axes.iter().all(|a| a.count >= 1), Config, "grid axes need at least one point");
    match axes {
        [a] => Ok(grid1d(&a.values())),
        [a, b] => Ok(grid2d(&a.values(), &b.values())),
        _ => Err(Error::Config(format!("grids have one or two axes, got {}", axes.len()))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub max_epochs: usize,
    pub schedule: LrSchedule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActiveConfig {
    pub pool: Vec<Axis>,
    pub mu: f64,
    pub threshold: f64,
    pub max_points: usize,
    pub warm_start: bool,
}

/// Paired NN / plain-VQE runs (speedup and convergence-table kinds).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairedConfig {
    pub deltas: Vec<f64>,
    pub trials: usize,
    /// Relative-error bound counted as converged.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Name of the experiment; also the default output subdirectory.
    pub name: String,
    pub seed: u64,
    /// Empty means: `--out`, else `$NNVQE_OUT_DIR/<name>`, else `nnvqe-out/<name>`.
    pub out_dir: String,
    pub hamiltonian: HamiltonianConfig,
    pub models: Vec<ModelConfig>,
    pub training: TrainingConfig,
    pub train_grid: Vec<Axis>,
    pub test_grid: Vec<Axis>,
    pub active: ActiveConfig,
    pub paired: PairedConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.models.is_empty(), Config, "at least one [[models]] entry is required");
        let mut labels: Vec<&str> = self.models.iter().map(|m| m.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        ensure!(labels.len() == self.models.len(), Config, "model labels must be unique");
        for m in &self.models {
            ensure!(
                !m.label.is_empty() && m.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
                Config,
                "model label {:?} must be non-empty ASCII letters, digits, '_' or '-'",
                m.label
            );
            let family = self.hamiltonian.family(m.n_qubits)?;
            let circuit = m.circuit()?;
            m.encoder_spec(family.dim(), circuit.n_params(), self.seed).validate()?;
        }
        let dim = self.hamiltonian.family(self.models[0].n_qubits)?.dim();
        for (name, axes) in [("train_grid", &self.train_grid), ("test_grid", &self.test_grid), ("active.pool", &self.active.pool)] {
            ensure!(axes.len() == dim, Config, "{name} has {} axes for {dim} Hamiltonian parameters", axes.len());
            grid_points(axes)?;
        }
        self.training.schedule.validate()?;
        ensure!(self.training.max_epochs >= 1, Config, "training.max_epochs must be at least 1");
        ensure!(self.paired.trials >= 1, Config, "paired.trials must be at least 1");
        match self.kind {
            ExperimentKind::Sweep1d | ExperimentKind::ParamDump | ExperimentKind::BaselineCompare => {
                ensure!(dim == 1, Config, "{} needs hamiltonian.parameters = [\"delta\"]", self.kind)
            }
            ExperimentKind::Sweep2d => {
                ensure!(dim == 2, Config, "sweep2d needs hamiltonian.parameters = [\"delta\", \"lambda\"]")
            }
            ExperimentKind::Speedup | ExperimentKind::ConvergenceTable => {
                ensure!(dim == 1, Config, "{} varies delta only", self.kind);
                ensure!(!self.paired.deltas.is_empty(), Config, "paired.deltas is empty");
                for m in &self.models {
                    ensure!(m.encoder == EncoderKind::Mlp, Config, "{} compares an MLP encoder with plain VQE", self.kind);
                }
            }
            ExperimentKind::ActiveLearn => {}
        }
        Ok(())
    }

    /// Resolved config as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config types always serialize")
    }
}

/// Parses a config file. See [`parse_config`].
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses config text, filling unset fields from the preset named by
/// `preset = "..."` or else by the default preset of `kind`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let user: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let preset = match (user.get("preset"), user.get("kind")) {
        (Some(p), _) => p
            .as_str()
            .ok_or_else(|| Error::Config("`preset` must be a string".into()))?
            .to_string(),
        (None, Some(k)) => {
            let kind: ExperimentKind = k
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| Error::Config(format!("field `kind`: {e}")))?;
            kind.default_preset().to_string()
        }
        (None, None) => return Err(Error::Config("config needs a `kind` or a `preset`".into())),
    };
    let base = presets::preset(&preset)?;
    let mut merged: toml::Table = toml::Table::try_from(&base).expect("config types always serialize");

    let mut user = user;
    user.remove("preset");
    check_known_keys(&user, &merged, "", text)?;
    merge(&mut merged, user);

    let config: ExperimentConfig = toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Rejects keys absent from the schema, reporting the dotted path and line.
fn check_known_keys(user: &toml::Table, schema: &toml::Table, prefix: &str, text: &str) -> Result<()> {
    for (key, value) in user {
        let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
        let Some(known) = schema.get(key) else {
            let line = find_line(text, key).map_or(String::new(), |l| format!("line {l}: "));
            return Err(Error::Config(format!("{line}unknown key `{path}`")));
        };
        match (value, known) {
            (toml::Value::Table(u), toml::Value::Table(s)) => check_known_keys(u, s, &path, text)?,
            (toml::Value::Array(u), toml::Value::Array(s)) => {
                if let Some(toml::Value::Table(template)) = s.first() {
                    for item in u {
                        if let toml::Value::Table(t) = item {
                            check_known_keys(t, template, &path, text)?;
                        }
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn find_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|line| {
        let line = line.trim_start();
        line.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
            || line.trim_start_matches('[').trim_end_matches(']').rsplit('.').next() == Some(key)
    })
    .map(|i| i + 1)
}

/// Tables merge recursively; any other value replaces the base value.
fn merge(base: &mut toml::Table, user: toml::Table) {
    for (key, value) in user {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_alone_gives_preset() {
        let c = parse_config("kind = \"speedup\"\n").unwrap();
        assert_eq!(c, presets::preset("fig4").unwrap());
    }

    #[test]
    fn partial_override() {
        let c = parse_config("preset = \"fig2\"\nseed = 7\n[training]\nmax_epochs = 10\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.training.max_epochs, 10);
        assert_eq!(c.training.schedule.initial, 0.009);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config("kind = \"sweep1d\"\n\n[training]\nmax_epoch = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("training.max_epoch") && msg.contains("line 4"), "{msg}");

        let err = parse_config("kind = \"sweep1d\"\n[[models]]\nlabel = \"a\"\ndepht = 1\n").unwrap_err();
        assert!(err.to_string().contains("models.depht"), "{err}");
    }

    #[test]
    fn bad_values() {
        assert!(parse_config("kind = \"nope\"").is_err());
        assert!(parse_config("seed = 1").is_err());
        assert!(parse_config("kind = \"sweep1d\"\nseed = \"x\"").is_err());
        assert!(parse_config("kind = \"sweep1d\"\n[hamiltonian]\nparameters = [\"delta\", \"lambda\"]").is_err());
        assert!(parse_config("kind = [").is_err());
    }
}
