use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use nnvqe::experiment::{self, ExperimentConfig, PlotOptions};
use nnvqe::Error;

#[derive(Parser)]
#[command(name = "nnvqe", version, about = "Neural-network encoded VQE experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a built-in preset.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        /// Print the resolved config instead of running it.
        #[arg(long)]
        show: bool,
    },
    /// Render a CSV artifact as SVG.
    Plot {
        csv: PathBuf,
        /// Output file (default: the CSV path with an .svg extension).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Column to draw; repeat for several.
        #[arg(long = "column")]
        columns: Vec<String>,
        #[arg(long, conflicts_with = "linear")]
        log: bool,
        #[arg(long)]
        linear: bool,
    },
    /// List the built-in presets.
    Presets,
}

fn execute(mut config: ExperimentConfig, out: Option<&Path>, seed: Option<u64>, threads: Option<usize>) -> Result<(), Error> {
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot set up {k} threads: {e}")))?;
    }
    let dir = experiment::resolve_out_dir(&config, out);
    let report = experiment::run_experiment(&config, &dir)?;
    for artifact in &report.artifacts {
        println!("{}", report.out_dir.join(artifact).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, threads } => {
            experiment::load_config(&config).and_then(|c| execute(c, out.as_deref(), seed, threads))
        }
        Command::Preset { name, out, seed, threads, show } => experiment::preset(&name).and_then(|mut c| {
            if show {
                c.seed = seed.unwrap_or(c.seed);
                print!("{}", c.to_toml());
                Ok(())
            } else {
                execute(c, out.as_deref(), seed, threads)
            }
        }),
        Command::Plot { csv, out, columns, log, linear } => {
            let options = PlotOptions { columns, log_y: (log || linear).then_some(log) };
            let target = out.unwrap_or_else(|| csv.with_extension("svg"));
            experiment::plot_csv(&csv, &options)
                .and_then(|svg| std::fs::write(&target, svg).map_err(Error::from))
                .map(|()| println!("{}", target.display()))
        }
        Command::Presets => {
            print!("{}", experiment::list_presets());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiment::exit_code(&e))
        }
    }
}
