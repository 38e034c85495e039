//! Command-line front end: configuration, the three commands and report
//! emission. Exit status 0 when every check passes, 1 on a failed check,
//! 2 on a configuration error and 3 on a runtime abort.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{dynamics, spectrum, verify, Failure, Output, CALOGERO_CHECKS};
pub use config::{parse_sector, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "gaudin-kp", version, about = "Gaudin T-operators, KP identities and the Calogero-Moser correspondence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Restrict `verify` to these checks.
    #[arg(long, global = true, value_name = "NAME[,NAME...]", value_delimiter = ',')]
    pub check: Vec<String>,
    /// Weight sector as multiplicities `a1,...,aN`.
    #[arg(long, global = true, value_name = "a1,...,aN")]
    pub sector: Option<String>,
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Directory for reports; without it the JSON report goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Run identity checks in floating point with a tolerance.
    #[arg(long, global = true)]
    pub float: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Identity suite and classical correspondence checks.
    Verify,
    /// Direct and classical spectra, matched.
    Spectrum,
    /// Zeros of an eigenvalue of the master T-operator along the second time.
    Dynamics {
        /// Index of the eigenstate within the sector, by increasing `H_1`.
        #[arg(long)]
        state: Option<usize>,
        /// Window end `t_2`, as `p/q`.
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

/// Configuration with the command-line overrides applied.
pub fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| Failure::Config(e.to_string()))?,
        None => RunConfig::default_model(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if !cli.check.is_empty() {
        cfg.checks = cli.check.clone();
    }
    if let Some(s) = &cli.sector {
        let counts = parse_sector(s).map_err(Failure::Config)?;
        cfg.sector_label(&counts).map_err(Failure::Config)?;
        cfg.sector = Some(counts);
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.float |= cli.float;
    if let Command::Dynamics { state, window, steps } = &cli.command {
        if let Some(s) = state {
            cfg.state = *s;
        }
        if let Some(w) = window {
            cfg.set_window(w).map_err(Failure::Config)?;
        }
        if let Some(s) = steps {
            cfg.steps = *s;
        }
    }
    Ok(cfg)
}

fn emit(out: &Output, cfg: &RunConfig, default_dir: Option<&str>) -> Result<(), Failure> {
    let dir = cfg.out.clone().or_else(|| default_dir.map(PathBuf::from));
    match dir {
        Some(d) => commands::write_all(out, &d).map_err(|e| Failure::Abort(format!("writing {}: {e}", d.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            for (_, body) in &out.files {
                stdout.write_all(body.as_bytes()).map_err(|e| Failure::Abort(e.to_string()))?;
            }
            Ok(())
        }
    }
}

/// Runs the parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let result = resolve(cli).and_then(|cfg| {
        let (out, default_dir) = match cli.command {
            Command::Verify => (verify(&cfg)?, None),
            Command::Spectrum => (spectrum(&cfg)?, None),
            Command::Dynamics { .. } => (dynamics(&cfg)?, Some("output")),
        };
        emit(&out, &cfg, default_dir)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            for l in &out.lines {
                eprintln!("{l}");
            }
            if let Some(a) = &out.aborted {
                eprintln!("runtime abort: {a}");
                3
            } else if out.passed {
                0
            } else {
                1
            }
        }
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}
