use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use monozero::harness::{run_file, Kind, Overrides, TraceFormat};

#[derive(Parser)]
#[command(name = "monozero", version, about = "Anchored duality-map solvers for monotone operator problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Problem configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for trace and report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<u64>,
    /// Residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Find a zero of the configured operator.
    Solve,
    /// Minimize the configured functional.
    Minimize,
    /// Solve a variational inequality over the configured family.
    Vi,
    /// Projected-gradient baseline.
    Gp,
    /// Regularization path of resolvents.
    Respath,
    /// Variational-inequality solver against the projected-gradient baseline.
    Compare,
    /// Property audit.
    Check,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = match cli.command {
        Command::Solve => Kind::Zero,
        Command::Minimize => Kind::Minimize,
        Command::Vi => Kind::Vi,
        Command::Gp => Kind::GradientProjection,
        Command::Respath => Kind::ResolventPath,
        Command::Compare => Kind::Compare,
        Command::Check => Kind::Audit,
    };
    let g = cli.global;
    let overrides = Overrides {
        kind: Some(kind),
        out: g.out,
        seed: g.seed,
        format: g.format.map(|f| match f {
            Format::Csv => TraceFormat::Csv,
            Format::Json => TraceFormat::Json,
        }),
        max_iter: g.max_iter,
        tol: g.tol,
    };
    let outcome = run_file(g.config.as_deref(), &overrides);
    if outcome.summary.starts_with("error:") {
        eprint!("{}", outcome.summary);
    } else {
        print!("{}", outcome.summary);
    }
    ExitCode::from(outcome.exit_code as u8)
}
