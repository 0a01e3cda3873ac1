use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zmstat_cli::check::library_det;
use zmstat_cli::commands::{cmd_check, cmd_table, cmd_thermo, gstate_table, tmin_table, CouplingRun, TABLE_LAMBDAS};
use zmstat_cli::config::{parse_methods, Format, GridScale, Overrides, RunConfig};
use zmstat_cli::{CliError, THREADS_ENV};

#[derive(Parser)]
#[command(name = "zmstat", version, about = "Zero-mode thermodynamics of quartic oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// F, U and C over a temperature grid for each method.
    Thermo(ThermoArgs),
    /// Ground-state energies: exact diagonalization vs maximum of the quadratic F.
    Gstate(CouplingArgs),
    /// Validity boundary T_min of the quadratic approximation.
    Tmin(CouplingArgs),
    /// Run the invariant suite.
    Check,
}

#[derive(Args)]
struct ThermoArgs {
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    tcount: Option<usize>,
    #[arg(long, value_enum)]
    tscale: Option<GridScale>,
    /// Comma-separated subset of classical,quadratic,improved,oneloop,exact.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct CouplingArgs {
    /// Comma-separated couplings.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn thermo_config(a: ThermoArgs) -> Result<RunConfig, CliError> {
    let base = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let methods = a.methods.as_deref().map(parse_methods).transpose()?;
    Ok(base.apply(Overrides {
        mass: a.mass,
        omega: a.omega,
        lambda: a.lambda,
        tmin: a.tmin,
        tmax: a.tmax,
        tcount: a.tcount,
        tscale: a.tscale,
        methods,
        format: a.format,
        out: a.out,
    }))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Thermo(a) => cmd_thermo(&thermo_config(a)?),
        Command::Gstate(a) => {
            let run = CouplingRun {
                mass: a.mass,
                omega: a.omega,
                lambdas: a.lambdas.unwrap_or_else(|| TABLE_LAMBDAS.to_vec()),
            };
            cmd_table(gstate_table(&run), &run, a.format, a.out.as_deref())
        }
        Command::Tmin(a) => {
            let run = CouplingRun {
                mass: a.mass,
                omega: a.omega,
                lambdas: a.lambdas.unwrap_or_default(),
            };
            cmd_table(tmin_table(&run), &run, a.format, a.out.as_deref())
        }
        Command::Check => cmd_check(&library_det).map(|_| ()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zmstat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
