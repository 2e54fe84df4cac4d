//! Configuration-driven experiments behind the `nnvqe` binary.

mod config;
mod plot;
mod presets;
mod run;

pub use config::{
    grid_points, load_config, parse_config, ActiveConfig, Axis, ExperimentConfig, ExperimentKind, HamiltonianConfig,
    ModelConfig, PairedConfig, TrainingConfig,
};
pub use plot::{plot_csv, PlotOptions};
pub use presets::{list_presets, preset, PresetInfo, PRESETS};
pub use run::{exit_code, resolve_out_dir, run_experiment, RunReport, MANIFEST, OUT_DIR_ENV};
