//! Built-in experiment presets.

use crate::ansatz::AnsatzFamily;
use crate::encoder::EncoderKind;
use crate::error::{Error, Result};
use crate::training::LrSchedule;

use super::config::*;

pub struct PresetInfo {
    pub name: &'static str,
    pub kind: ExperimentKind,
    pub description: &'static str,
}

pub const PRESETS: [PresetInfo; 8] = [
    PresetInfo {
        name: "fig2",
        kind: ExperimentKind::Sweep1d,
        description: "n=8, field 0.75, MERA D=1,2,3; 20 training deltas in [-3,3], 201 test deltas in [-4,4]",
    },
    PresetInfo {
        name: "fig3",
        kind: ExperimentKind::ActiveLearn,
        description: "n=8, field 0.75, MERA D=2; active selection from 61 pool deltas, mu=6",
    },
    PresetInfo {
        name: "fig4",
        kind: ExperimentKind::Speedup,
        description: "n=12, HEA D=3; NN encoder vs plain VQE at delta 1.5 and 2.0, 20 seeds, 100 epochs",
    },
    PresetInfo {
        name: "fig5",
        kind: ExperimentKind::Sweep2d,
        description: "n=12, HEA D=1,2; 10x5 training grid, 101x51 test grid with phase-boundary columns",
    },
    PresetInfo {
        name: "table_s1",
        kind: ExperimentKind::ConvergenceTable,
        description: "HEA D=3 convergence rates, n=8,10,12 and delta 1.0,1.5,2.0, 20 trials",
    },
    PresetInfo {
        name: "fig_s5",
        kind: ExperimentKind::Sweep2d,
        description: "n=8, HEA D=1,2; 10x5 training grid, 101x51 test grid",
    },
    PresetInfo {
        name: "fig_s6",
        kind: ExperimentKind::BaselineCompare,
        description: "n=8 MERA D=1,2,3; MLP encoder vs affine (meta-VQE style) encoder",
    },
    PresetInfo {
        name: "fig_s7",
        kind: ExperimentKind::ParamDump,
        description: "n=8 MERA D=2, dropout 0.05; circuit parameters and their cosines versus delta",
    },
];

/// Fixed-width table of presets.
pub fn list_presets() -> String {
    let mut out = format!("{:<10} {:<18} {}\n", "preset", "kind", "description");
    for p in &PRESETS {
        out.push_str(&format!("{:<10} {:<18} {}\n", p.name, p.kind.name(), p.description));
    }
    out
}

fn model(label: &str, n: usize, ansatz: AnsatzFamily, depth: usize, hidden: usize, dropout: f64) -> ModelConfig {
    ModelConfig {
        label: label.to_string(),
        n_qubits: n,
        ansatz,
        depth,
        encoder: EncoderKind::Mlp,
        hidden_dim: hidden,
        dropout,
    }
}

fn axis(start: f64, stop: f64, count: usize) -> Axis {
    Axis { start, stop, count }
}

fn one_parameter(kind: ExperimentKind, name: &str, models: Vec<ModelConfig>) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        name: name.to_string(),
        seed: 0,
        out_dir: String::new(),
        hamiltonian: HamiltonianConfig { parameters: vec!["delta".into()], field: 0.75 },
        models,
        training: TrainingConfig {
            max_epochs: 2500,
            schedule: LrSchedule { initial: 0.009, factor: 0.7, interval: 1000 },
        },
        train_grid: vec![axis(-3.0, 3.0, 20)],
        test_grid: vec![axis(-4.0, 4.0, 201)],
        active: ActiveConfig {
            pool: vec![axis(-3.0, 3.0, 61)],
            mu: 6.0,
            threshold: 5e-3,
            max_points: 20,
            warm_start: true,
        },
        paired: PairedConfig { deltas: vec![2.0], trials: 20, threshold: 0.1 },
    }
}

fn mera_sweep_models() -> Vec<ModelConfig> {
    vec![
        model("mera_d1", 8, AnsatzFamily::Mera, 1, 20, 0.30),
        model("mera_d2", 8, AnsatzFamily::Mera, 2, 20, 0.05),
        model("mera_d3", 8, AnsatzFamily::Mera, 3, 30, 0.20),
    ]
}

fn two_parameter(name: &str, n: usize, hidden: usize) -> ExperimentConfig {
    let mut c = one_parameter(
        ExperimentKind::Sweep2d,
        name,
        vec![
            model("hea_d1", n, AnsatzFamily::Hea, 1, hidden, 0.2),
            model("hea_d2", n, AnsatzFamily::Hea, 2, hidden, 0.2),
        ],
    );
    c.hamiltonian.parameters = vec!["delta".into(), "lambda".into()];
    c.training = TrainingConfig {
        max_epochs: 4000,
        schedule: LrSchedule { initial: 0.01, factor: 0.7, interval: 800 },
    };
    c.train_grid = vec![axis(-1.0, 1.0, 10), axis(0.0, 1.0, 5)];
    c.test_grid = vec![axis(-1.0, 1.0, 101), axis(0.0, 1.0, 51)];
    c.active.pool = vec![axis(-1.0, 1.0, 21), axis(0.0, 1.0, 11)];
    c
}

/// Resolved configuration of a named preset.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    Ok(match name {
        "fig2" => one_parameter(ExperimentKind::Sweep1d, name, mera_sweep_models()),
        "fig3" => {
            let mut c = one_parameter(
                ExperimentKind::ActiveLearn,
                name,
                vec![model("mera_d2", 8, AnsatzFamily::Mera, 2, 25, 0.2)],
            );
            c.training.schedule = LrSchedule { initial: 0.009, factor: 0.85, interval: 200 };
            c.test_grid = vec![axis(-3.0, 3.0, 201)];
            c
        }
        "fig4" => {
            let mut c = one_parameter(
                ExperimentKind::Speedup,
                name,
                vec![model("hea_d3", 12, AnsatzFamily::Hea, 3, 36, 0.2)],
            );
            c.training = TrainingConfig { max_epochs: 100, schedule: LrSchedule::constant(0.009) };
            c.paired.deltas = vec![1.5, 2.0];
            c
        }
        "fig5" => two_parameter(name, 12, 40),
        "fig_s5" => two_parameter(name, 8, 25),
        "table_s1" => {
            let mut c = one_parameter(
                ExperimentKind::ConvergenceTable,
                name,
                vec![
                    model("hea_d3_n8", 8, AnsatzFamily::Hea, 3, 25, 0.2),
                    model("hea_d3_n10", 10, AnsatzFamily::Hea, 3, 32, 0.2),
                    model("hea_d3_n12", 12, AnsatzFamily::Hea, 3, 36, 0.2),
                ],
            );
            c.training = TrainingConfig { max_epochs: 100, schedule: LrSchedule::constant(0.009) };
            c.paired.deltas = vec![1.0, 1.5, 2.0];
            c
        }
        "fig_s6" => {
            let mut models = mera_sweep_models();
            for depth in 1..=3 {
                models.push(ModelConfig {
                    label: format!("affine_d{depth}"),
                    encoder: EncoderKind::Affine,
                    hidden_dim: 0,
                    dropout: 0.0,
                    ..model("", 8, AnsatzFamily::Mera, depth, 0, 0.0)
                });
            }
            one_parameter(ExperimentKind::BaselineCompare, name, models)
        }
        "fig_s7" => one_parameter(
            ExperimentKind::ParamDump,
            name,
            vec![model("mera_d2", 8, AnsatzFamily::Mera, 2, 20, 0.05)],
        ),
        other => {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            return Err(Error::Config(format!("unknown preset {other:?}; available: {}", names.join(", "))));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_valid_and_round_trips() {
        for info in &PRESETS {
            let c = preset(info.name).unwrap();
            assert_eq!(c.kind, info.kind, "{}", info.name);
            c.validate().unwrap_or_else(|e| panic!("{}: {e}", info.name));
            assert_eq!(parse_config(&c.to_toml()).unwrap(), c, "{}", info.name);
        }
        for kind in ExperimentKind::ALL {
            assert_eq!(preset(kind.default_preset()).unwrap().kind, kind);
        }
    }

    #[test]
    fn speedup_preset_values() {
        let c = preset("fig4").unwrap();
        assert_eq!(c.paired.deltas, vec![1.5, 2.0]);
        assert_eq!(c.models[0].n_qubits, 12);
        assert_eq!((c.models[0].ansatz, c.models[0].depth), (AnsatzFamily::Hea, 3));
        assert_eq!(c.training.max_epochs, 100);
    }

    #[test]
    fn listing_names_every_preset() {
        let table = list_presets();
        assert!(table.lines().any(|l| l.starts_with("table_s1 ")));
        assert_eq!(table.lines().count(), 1 + PRESETS.len());
        assert!(matches!(preset("fig9"), Err(Error::Config(_))));
    }
}
