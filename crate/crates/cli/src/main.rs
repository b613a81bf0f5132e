use std::path::PathBuf;
use std::process::ExitCode;

use bohr_cli::commands::{self, CliError, OpArgs, OpName, Outcome, RMode, DEFAULT_A_VALUES};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bohr", version, about = "Bohr radii for Cesàro and Bernardi operators on bounded analytic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the Bohr radius of one operator.
    Radius {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Radius as a function of beta (cesaro, cbeta) or gamma (bernardi).
    Curve {
        #[arg(long, value_enum)]
        op: OpName,
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// Explicit parameter values, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "count", allow_hyphen_values = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, default_value_t = 3.0)]
        stop: f64,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Check the inequality on seeded random bounded functions.
    Verify {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "below")]
        r_mode: RMode,
        /// Radius used in `above` mode (defaults to 1.05 R).
        #[arg(long)]
        r: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Decompose the extremal majorant and check the quadratic remainder.
    Sharpness {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, value_delimiter = ',')]
        a: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the internal consistency suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn run(command: Command) -> (Result<Outcome, CliError>, Output) {
    match command {
        Command::Radius { op, tol, output } => (commands::cmd_radius(&op, tol), output),
        Command::Curve { op, m, values, start, stop, count, tol, output } => {
            let params = commands::grid(&values, start, stop, count);
            (commands::cmd_curve(op, m, &params, tol), output)
        }
        Command::Verify { op, samples, seed, r_mode, r, output } => {
            (commands::cmd_verify(&op, samples, seed, r_mode, r), output)
        }
        Command::Sharpness { op, r, a, output } => {
            let a = if a.is_empty() { DEFAULT_A_VALUES.to_vec() } else { a };
            (commands::cmd_sharpness(&op, r, &a), output)
        }
        Command::Selftest { seed, output } => (commands::cmd_selftest(seed), output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = run(cli.command);
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code as u8);
        }
    };
    let text = match output.format {
        Format::Json => outcome.report.to_json(),
        Format::Csv => outcome.report.to_csv(),
    };
    match output.out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(commands::EXIT_FAILURE as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.exit_code as u8)
}
