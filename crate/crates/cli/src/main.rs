// Verification guards use `!(diff <= tol)` so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod expr;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Scalar};
use error::{config as config_error, CliResult};

/// Sweeps and checks for lumped stroboscopic measurement statistics.
#[derive(Parser)]
#[command(name = "qlump", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Recompute closed-form values by brute force; exit 3 on mismatch.
    #[arg(long, global = true)]
    verify: bool,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `ring:N=6` or `twoqubit:l1=1,l2=1`.
    #[arg(long, global = true)]
    model: Option<String>,
    /// `parity`, `singletons`, `probe` or a literal like `A:0,2,4;B:1,3,5`.
    #[arg(long, global = true)]
    partition: Option<String>,
    /// `ideal`, `classical` or `quantum`.
    #[arg(long, global = true)]
    scheme: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    tau: Option<String>,
    /// `0, pi/4, pi/2` or `linspace(0, pi, 101)`.
    #[arg(long, global = true)]
    tau_grid: Option<String>,
    #[arg(long, global = true)]
    tau_max: Option<String>,
    #[arg(long, global = true)]
    theta_grid: Option<String>,
    /// Number of unitary steps between the first and last measurement.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// `basis:0`, `mixed`, `pure:…`, `diag:…` or `witness:theta=…`.
    #[arg(long, global = true)]
    state: Option<String>,
    #[arg(long, global = true)]
    trajectories: Option<usize>,
    /// `consistent` or `doubled`.
    #[arg(long, global = true)]
    convention: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Lumped transition probability T_A^B over a tau grid (CSV).
    TabSweep,
    /// Coherence coefficients c_d over a tau grid (CSV).
    CoherenceSweep,
    /// Trace-distance witness over a (theta, tau) grid (CSV).
    WitnessGrid,
    /// Classical and quantum magic periods (JSON).
    Magic,
    /// Lumpability and detectable coherence verdict (JSON).
    MarkovCheck,
    /// Monte Carlo measurement records (CSV).
    Sample,
}

impl Cli {
    fn effective_config(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let expr = |s: &String| Scalar::Expr(s.clone());
        if self.seed.is_some() {
            cfg.run.seed = self.seed;
        }
        if self.model.is_some() {
            cfg.system.model = self.model.clone();
        }
        if self.partition.is_some() {
            cfg.system.partition = self.partition.clone();
        }
        if self.scheme.is_some() {
            cfg.measurement.scheme = self.scheme.clone();
        }
        if let Some(t) = &self.tau {
            cfg.time.tau = Some(expr(t));
        }
        if self.tau_grid.is_some() {
            cfg.time.tau_grid = self.tau_grid.clone();
        }
        if let Some(t) = &self.tau_max {
            cfg.time.tau_max = Some(expr(t));
        }
        if self.theta_grid.is_some() {
            cfg.preparation.theta_grid = self.theta_grid.clone();
        }
        if self.n.is_some() {
            cfg.measurement.n = self.n;
        }
        if self.state.is_some() {
            cfg.preparation.state = self.state.clone();
        }
        if self.trajectories.is_some() {
            cfg.run.trajectories = self.trajectories;
        }
        if self.convention.is_some() {
            cfg.run.convention = self.convention.clone();
        }
        Ok(cfg)
    }
}

fn init_threads() -> CliResult<()> {
    if let Ok(raw) = std::env::var("QLUMP_THREADS") {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| config_error(format!("QLUMP_THREADS: expected a positive integer, got `{raw}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| config_error(format!("QLUMP_THREADS: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    init_threads()?;
    let cfg = cli.effective_config()?;
    let text = match cli.command {
        Command::TabSweep => commands::tab_sweep(&cfg, cli.verify)?,
        Command::CoherenceSweep => commands::coherence_sweep(&cfg, cli.verify)?,
        Command::WitnessGrid => commands::witness_grid(&cfg, cli.verify)?,
        Command::Magic => commands::magic(&cfg, cli.verify)?,
        Command::MarkovCheck => commands::markov_check(&cfg, cli.verify)?,
        Command::Sample => commands::sample(&cfg, cli.verify)?,
    };
    output::emit(&text, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qlump: {e}");
            e.exit_code()
        }
    }
}
