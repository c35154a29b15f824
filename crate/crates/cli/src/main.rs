use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use isac_netsim::config::{Experiment, ExperimentConfig, OutputFormat};
use isac_netsim::{run, ExitStatus};

/// Runs an ISAC network experiment and writes its tables and a manifest.
///
/// Values come from the experiment's preset, then the --config file, then
/// the flags below (later sources win).
#[derive(Debug, Parser)]
#[command(name = "isac-netsim", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,
    /// TOML configuration replacing the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Output directory (default: results/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for Monte Carlo.
    #[arg(long, env = "ISAC_NETSIM_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Also write a gnuplot script next to each plottable CSV.
    #[arg(long)]
    gnuplot: bool,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn invalid(messages: impl IntoIterator<Item = String>) -> ExitCode {
    for m in messages {
        eprintln!("error: {m}");
    }
    ExitCode::from(ExitStatus::InvalidConfig.code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        None => ExperimentConfig::preset(cli.experiment),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return invalid([format!("{}: {e}", path.display())]),
            };
            match ExperimentConfig::from_toml(&text) {
                Ok(c) => c,
                Err(issues) => return invalid(issues.iter().map(|i| format!("{}: {i}", path.display()))),
            }
        }
    };
    if config.experiment != cli.experiment {
        return invalid([format!(
            "configuration is for '{}' but '{}' was requested",
            config.experiment, cli.experiment
        )]);
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    if let Some(out) = &cli.out {
        config.output_dir = Some(out.clone());
    }
    let issues = config.validate();
    if !issues.is_empty() {
        return invalid(issues.iter().map(ToString::to_string));
    }
    if cli.print_config {
        print!("{}", toml::to_string(&config).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return invalid(["--threads must be at least 1".to_string()]);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("global thread pool is built once");
    }
    let gnuplot = cli.gnuplot || config.options.gnuplot.unwrap_or(false);
    let out_dir = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(config.experiment.name()));
    match run(&config, &out_dir, gnuplot) {
        Ok((manifest, status)) => {
            for o in &manifest.outputs {
                println!("{}  {}", o.sha256, out_dir.join(&o.file).display());
            }
            if let Some(e) = &manifest.error {
                eprintln!("error: {e}");
            }
            ExitCode::from(status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: writing {}: {e}", out_dir.display());
            ExitCode::from(ExitStatus::NumericalFailure.code() as u8)
        }
    }
}
