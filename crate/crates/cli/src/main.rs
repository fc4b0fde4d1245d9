mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Report;

#[derive(Parser, Debug)]
#[command(name = "maxforms", version, about = "Differential forms, Maxwell eigenpairs and regularity checks on the half disk")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Exit with status 1 when a residual exceeds its tolerance.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sign-constant identities and exterior calculus laws in dimension N.
    Identities(commands::IdentitiesArgs),
    /// Positive zeros of J_{n-1/2} or its derivative.
    BesselZeros(commands::BesselArgs),
    /// Finite-difference spectrum of the half circle.
    Eigen1d(commands::Eigen1dArgs),
    /// Half-disk eigenvalues by the 2D and radial solvers against Bessel zeros.
    Eigen2d(commands::Eigen2dArgs),
    /// Rank of the Dirichlet-Neumann harmonic fields of an arc partition.
    DnFields(commands::DnArgs),
    /// H1 classification of a half-disk eigenform.
    Regularity(commands::RegularityArgs),
    /// Radial coefficient expansion of a half-disk eigenform.
    Expand(commands::ExpandArgs),
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::BesselZeros(_) | Command::Eigen1d(_) | Command::Eigen2d(_) => Format::Csv,
            _ => Format::Json,
        }
    }

    fn run(&self) -> maxforms::Result<Report> {
        match self {
            Command::Identities(a) => commands::identities(a),
            Command::BesselZeros(a) => commands::bessel_zeros(a),
            Command::Eigen1d(a) => commands::eigen1d(a),
            Command::Eigen2d(a) => commands::eigen2d(a),
            Command::DnFields(a) => commands::dn_fields(a),
            Command::Regularity(a) => commands::regularity(a),
            Command::Expand(a) => commands::expand(a),
        }
    }
}

fn apply_thread_limit() {
    let Ok(raw) = std::env::var("MAXFORMS_THREADS") else { return };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            maxforms::set_thread_limit(n);
        }
        _ => eprintln!("warning: ignoring MAXFORMS_THREADS={raw:?}, expected a positive integer"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    apply_thread_limit();
    let report = match cli.command.run() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_validation() { 2 } else { 1 });
        }
    };
    let text = match cli.global.format.unwrap_or_else(|| cli.command.default_format()) {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.to_json(),
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    for v in &report.violations {
        eprintln!("tolerance violation: {v}");
    }
    if cli.global.strict && !report.violations.is_empty() {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
