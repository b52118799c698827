//! Command-line front end for `lightstore`: runs scenario files, parameter
//! sweeps and quick design calculations, writing CSV tables and a manifest
//! that reproduces the run.

pub mod config;
pub mod run;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::Value;

use config::{Config, FieldError};

/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 1;
/// Exit status for bad usage, invalid configs and refused output directories.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config:{}", list(.0))]
    Invalid(Vec<FieldError>),
    #[error("output directory {0} already exists (use --force to overwrite)")]
    OutputExists(PathBuf),
    #[error(transparent)]
    Simulation(#[from] lightstore::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn list(errors: &[FieldError]) -> String {
    errors.iter().map(|e| format!("\n  {e}")).collect()
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Simulation(_) | CliError::Io { .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lightstore",
    version,
    about = "Pulse propagation through spectrally tailored absorbers"
)]
pub struct Cli {
    /// Output directory for simulate and sweep.
    #[arg(long, global = true, env = "LIGHTSTORE_OUT")]
    pub out: Option<PathBuf>,
    /// Write into an existing output directory.
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print nothing but results and errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate one pulse and write traces and reports.
    Simulate {
        /// Scenario JSON or a manifest from an earlier run.
        config: PathBuf,
    },
    /// Run the config's sweep block and write one table row per point.
    Sweep { config: PathBuf },
    /// Print the comb that maximises forward echo efficiency.
    AfcDesign {
        #[arg(long = "alphaL")]
        alpha_l: f64,
        #[arg(long)]
        period_us: Option<f64>,
    },
    /// Print the delay report for a Gaussian pulse through a hole.
    Slowlight {
        #[arg(long = "alphaL")]
        alpha_l: f64,
        #[arg(long)]
        delta0_mhz: f64,
        #[arg(long)]
        rms_us: f64,
        #[arg(long, default_value_t = 10.0)]
        gamma_khz: f64,
    },
    /// Check a config without simulating.
    Validate { config: PathBuf },
}

const DEFAULT_OUT: &str = "lightstore-out";

/// Reads a scenario or a manifest and inlines any sampled-profile CSV.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    let parse_err = |e: serde_json::Error| CliError::Parse {
        path: path.into(),
        message: e.to_string(),
    };
    let value: Value = serde_json::from_str(&text).map_err(parse_err)?;
    let body = match value {
        Value::Object(mut map) if map.contains_key("tool") && map.contains_key("config") => {
            map.remove("config").expect("checked")
        }
        v => v,
    };
    let mut config: Config = serde_json::from_value(body).map_err(parse_err)?;
    let base = path.parent().unwrap_or(Path::new("."));
    config.inline_sampled(base).map_err(|e| {
        CliError::Invalid(vec![FieldError {
            field: "profile.csv".into(),
            message: e.to_string(),
        }])
    })?;
    Ok(config)
}

/// Manifest recording the tool, its version and the self-contained config.
pub fn manifest(command: &str, config: &Config) -> Vec<u8> {
    let value = serde_json::json!({
        "tool": "lightstore",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("config serialises");
    text.push('\n');
    text.into_bytes()
}

fn prepare_out(dir: &Path, force: bool) -> Result<(), CliError> {
    if dir.exists() && !force {
        return Err(CliError::OutputExists(dir.into()));
    }
    Ok(())
}

fn write_files(dir: &Path, files: &run::Files) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    for (name, bytes) in files {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(io(&path))?;
    }
    Ok(())
}

/// Executes a parsed command line.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(&cli))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match &cli.command {
        Command::Simulate { config } | Command::Sweep { config } => {
            let is_sweep = matches!(cli.command, Command::Sweep { .. });
            let config = load_config(config)?;
            prepare_out(&out, cli.force)?;
            let (name, mut files) = if is_sweep {
                ("sweep", run::sweep_files(&config)?)
            } else {
                ("simulate", run::simulate_files(&config)?)
            };
            files.push(("manifest.json", manifest(name, &config)));
            write_files(&out, &files)?;
            if !cli.quiet {
                println!("wrote {} files to {}", files.len(), out.display());
            }
        }
        Command::AfcDesign { alpha_l, period_us } => {
            for line in run::afc_design_lines(*alpha_l, *period_us)? {
                println!("{line}");
            }
        }
        Command::Slowlight {
            alpha_l,
            delta0_mhz,
            rms_us,
            gamma_khz,
        } => {
            let table = run::slowlight_table(*alpha_l, *delta0_mhz, *rms_us, *gamma_khz)?;
            print!("{}", String::from_utf8_lossy(&table));
        }
        Command::Validate { config } => {
            let config = load_config(config)?;
            run::Scenario::build(&config)?;
            if let Some(sweep) = &config.sweep {
                for v in config.sweep_values() {
                    run::Scenario::build(&config.with_parameter(sweep.parameter, v))?;
                }
            }
            if !cli.quiet {
                println!("config ok");
            }
        }
    }
    Ok(())
}
