use bounded_sampling::harness::commands::{run, HarnessError};
use bounded_sampling::harness::config::{Command, ConfigError, ExperimentConfig};
use clap::{Parser, ValueEnum};
use log::{error, info, warn};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Mask,
    Dualmask,
    Gramian,
    Restore,
    Integrate,
    Condtable,
    Decay,
    Gpstudy,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Mask => Command::Mask,
            Sub::Dualmask => Command::DualMask,
            Sub::Gramian => Command::Gramian,
            Sub::Restore => Command::Restore,
            Sub::Integrate => Command::Integrate,
            Sub::Condtable => Command::CondTable,
            Sub::Decay => Command::Decay,
            Sub::Gpstudy => Command::GpStudy,
        }
    }
}

/// Sampling and reconstruction experiments on bounded domains.
///
/// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
/// 3 density certificate failed, 4 iteration diverged.
#[derive(Debug, Parser)]
#[command(name = "sampler", version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// `key = value` configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long, short = 'j')]
    level: Option<String>,
    /// `a,b` or `a,b;c,d` or `a,b^2`.
    #[arg(long)]
    domain: Option<String>,
    /// `random:N`, `jitter:N` or a CSV path.
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Any other configuration key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn configure(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let command = Command::from(cli.command);
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut cfg = ExperimentConfig::from_file(path)?;
            if cfg.command != command {
                warn!("config file names command '{}'; running '{command}'", cfg.command);
                cfg.command = command;
            }
            cfg
        }
        None => ExperimentConfig::new(command),
    };
    let flags = [
        ("n", &cli.n),
        ("h", &cli.h),
        ("level", &cli.level),
        ("domain", &cli.domain),
        ("nodes", &cli.nodes),
        ("seed", &cli.seed),
        ("tau", &cli.tau),
        ("nmax", &cli.nmax),
        ("tol", &cli.tol),
        ("out", &cli.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    for pair in &cli.set {
        let (k, v) = pair.split_once('=').ok_or_else(|| ConfigError::BadValue {
            key: "--set".into(),
            value: pair.clone(),
            message: "expected KEY=VALUE".into(),
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = configure(&cli).map_err(HarnessError::from).and_then(|cfg| {
        info!("configuration:\n{}", cfg.to_text());
        run(&cfg)
    });
    match result {
        Ok(report) => {
            match serde_json::to_string_pretty(&report) {
                Ok(text) => println!("{text}"),
                Err(e) => warn!("cannot print report: {e}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
