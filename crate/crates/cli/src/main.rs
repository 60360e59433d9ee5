//! Command-line surface of the NLI/SNR estimator.
//!
//! Subcommands: `validate`, `fit`, `estimate`, `oracle`, `compare`,
//! `sweep`. Reports go to `--out` (or stdout) as CSV or JSON with
//! identical numeric payloads. Exit codes: 0 ok, 1 validation/usage,
//! 2 numeric failure, 3 resource budget.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oband_gn::report::{self, SweepAxis};
use oband_gn::{load_config, ModelError};

#[derive(Parser)]
#[command(name = "oband-gn", version, about = "Closed-form NLI and SNR estimation for low-dispersion WDM links", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads (defaults to the core count).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Reserved for future stochastic features; the engine is
    /// deterministic and ignores it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Log level (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    /// Emit failures as machine-readable JSON on stderr.
    #[arg(long, global = true)]
    error_json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    Spans,
    Bandwidth,
    Power,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a configuration file.
    Validate { config: PathBuf },
    /// Per-channel ISRS profile fits.
    Fit { config: PathBuf },
    /// Closed-form per-channel NLI and SNR estimate.
    Estimate { config: PathBuf },
    /// Numerical-reference evaluation of selected channels.
    Oracle {
        config: PathBuf,
        /// Channel indices, comma separated (e.g. 1,21,41).
        #[arg(long, value_delimiter = ',', required = true)]
        channels: Vec<usize>,
    },
    /// Closed-form vs numerical-reference SNR deltas on selected channels.
    Compare {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        channels: Vec<usize>,
    },
    /// Repeated estimates along one system axis.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Axis values, comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Also compare against the reference on these channels per value.
        #[arg(long, value_delimiter = ',')]
        compare_channels: Option<Vec<usize>>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not failures; anything else is usage.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    if cli.seed.is_some() {
        log::info!("--seed is reserved; evaluation is deterministic");
    }

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.error_json {
                eprintln!(
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code() })
                );
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), ModelError> {
    match &cli.command {
        Command::Validate { config } => {
            let (spec, grid, _) = load_config(config)?;
            println!(
                "ok: {} channels over {:.3} THz, {} span(s), reference {:.1} nm",
                grid.n_channels(),
                grid.total_bandwidth() / 1e12,
                grid.n_spans,
                spec.reference_wavelength * 1e9
            );
            Ok(())
        }
        Command::Fit { config } => {
            let (spec, grid, settings) = load_config(config)?;
            let r = report::run_fit(&spec, &grid, &settings)?;
            emit(cli, &r.to_csv(), &r.to_json())
        }
        Command::Estimate { config } => {
            let (spec, grid, settings) = load_config(config)?;
            let r = report::run_estimate(&spec, &grid, &settings)?;
            emit(cli, &r.to_csv(), &r.to_json())
        }
        Command::Oracle { config, channels } => {
            let (spec, grid, settings) = load_config(config)?;
            let r = report::run_oracle(&spec, &grid, &settings, channels)?;
            emit(cli, &r.to_csv(), &r.to_json())
        }
        Command::Compare { config, channels } => {
            let (spec, grid, settings) = load_config(config)?;
            let r = report::run_compare(&spec, &grid, &settings, channels)?;
            emit(cli, &r.to_csv(), &r.to_json())
        }
        Command::Sweep { config, axis, values, compare_channels } => {
            let (spec, grid, settings) = load_config(config)?;
            let axis = match axis {
                Axis::Spans => SweepAxis::Spans,
                Axis::Bandwidth => SweepAxis::Bandwidth,
                Axis::Power => SweepAxis::Power,
            };
            let r = report::run_sweep(
                &spec,
                &grid,
                &settings,
                axis,
                values,
                compare_channels.as_deref(),
            )?;
            emit(cli, &r.to_csv(), &r.to_json())
        }
    }
}

fn emit(cli: &Cli, csv: &str, json: &str) -> Result<(), ModelError> {
    let payload = match cli.format {
        Format::Csv => csv,
        Format::Json => json,
    };
    match &cli.out {
        Some(path) => write_file(path, payload),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, payload: &str) -> Result<(), ModelError> {
    std::fs::write(path, payload)
        .map_err(|e| ModelError::Parse(format!("cannot write {}: {e}", path.display())))
}
