use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qibd_core::harness::{
    self, parse_grid, ExperimentConfig, HamiltonianSpec, OutputFormat, SourceSpec,
};
use qibd_core::{Coupling, ReadoutMode};

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Phase-weighted Bhattacharyya distance experiments.
#[derive(Debug, Parser)]
#[command(name = "qibd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the three-qubit reference table through both evaluation paths.
    Validate,
    /// Distance as a function of the interaction strength alpha.
    SweepAlpha(RunArgs),
    /// Distance between p and the correlated family q_theta over a theta grid.
    SweepTheta(RunArgs),
    /// Compare one pair of distributions.
    Distance(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON experiment config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Number of data qubits (distributions have 2^n outcomes).
    #[arg(long)]
    n: Option<usize>,

    /// gaussian:MU,SIGMA | theta:THETA | uniform | file:PATH
    #[arg(long)]
    p: Option<SourceSpec>,

    /// Same syntax as --p. Ignored by sweep-theta.
    #[arg(long)]
    q: Option<SourceSpec>,

    /// Single interaction strength.
    #[arg(long, conflicts_with = "alpha_grid", allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Inclusive alpha grid START:STOP:STEP.
    #[arg(long, allow_hyphen_values = true)]
    alpha_grid: Option<Grid>,

    /// Inclusive theta grid START:STOP:STEP.
    #[arg(long, allow_hyphen_values = true)]
    theta_grid: Option<Grid>,

    /// Estimate each ancilla probability from N shots. The real and
    /// imaginary settings each get their own N shots.
    #[arg(long)]
    shots: Option<u64>,

    /// Seed for shot sampling; grid point k uses SEED xor k.
    #[arg(long, requires = "shots")]
    seed: Option<u64>,

    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv | json
    #[arg(long)]
    format: Option<OutputFormat>,

    /// ising | custom:FILE (JSON list of [i, j, weight] triples)
    #[arg(long)]
    hamiltonian: Option<String>,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_grid(s).map(Grid).map_err(|e| e.to_string())
    }
}

fn parse_hamiltonian(s: &str) -> Result<HamiltonianSpec> {
    match s.split_once(':') {
        None if s == "ising" => Ok(HamiltonianSpec::IsingChain),
        Some(("custom", path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading couplings {path}"))?;
            let couplings: Vec<Coupling> =
                serde_json::from_str(&text).with_context(|| format!("parsing couplings {path}"))?;
            Ok(HamiltonianSpec::Custom { couplings })
        }
        _ => anyhow::bail!("unknown hamiltonian {s:?}, expected ising or custom:FILE"),
    }
}

impl RunArgs {
    fn into_config(self, base: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                ExperimentConfig::from_json(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => base,
        };
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(p) = self.p {
            config.p = p;
        }
        if let Some(q) = self.q {
            config.q = q;
        }
        if let Some(alpha) = self.alpha {
            config.alpha_grid = vec![alpha];
        }
        if let Some(Grid(grid)) = self.alpha_grid {
            config.alpha_grid = grid;
        }
        if let Some(Grid(grid)) = self.theta_grid {
            config.theta_grid = Some(grid);
        }
        if let Some(shots) = self.shots {
            config.mode = ReadoutMode::Shots {
                shots,
                seed: self.seed.unwrap_or(0),
            };
        }
        if let Some(out) = self.out {
            config.output_path = Some(out);
        }
        if let Some(format) = self.format {
            config.format = format;
        }
        if let Some(h) = self.hamiltonian {
            config.hamiltonian = parse_hamiltonian(&h)?;
        }
        log::debug!("config: {config:?}");
        Ok(config)
    }
}

fn output(config: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &config.output_path {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_rows(config: &ExperimentConfig, rows: &[harness::SweepRow]) -> Result<()> {
    let mut out = output(config)?;
    harness::write_rows(rows, config.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate => {
            let report = harness::validate()?;
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::from(EXIT_MISMATCH));
            }
        }
        Command::SweepAlpha(args) => {
            let config = args.into_config(ExperimentConfig::alpha_sweep_default())?;
            let rows = harness::sweep_alpha(&config)?;
            emit_rows(&config, &rows)?;
        }
        Command::SweepTheta(args) => {
            let config = args.into_config(ExperimentConfig::theta_sweep_default())?;
            let rows = harness::sweep_theta(&config)?;
            emit_rows(&config, &rows)?;
        }
        Command::Distance(args) => {
            let base = ExperimentConfig {
                alpha_grid: vec![1.0],
                ..ExperimentConfig::alpha_sweep_default()
            };
            let config = args.into_config(base)?;
            let record = harness::distance(&config)?;
            let mut out = output(&config)?;
            match config.format {
                OutputFormat::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&record.to_json())?)?
                }
                OutputFormat::Csv => writeln!(out, "{record}")?,
            }
            out.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QIBD_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
