//! Command-line definition and dispatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Context, Failure, HintText, MassMode, Outcome};
use crate::decimal::Scalar;
use crate::mp::Mp;

/// Environment variable that overrides the identity-check tolerances.
pub const TOLERANCE_ENV: &str = "JACOBI_TOLERANCE";

/// Supported `--precision` values, in mantissa bits.
pub const PRECISIONS: [u32; 5] = [53, 128, 256, 512, 1024];

#[derive(Debug, Parser)]
#[command(name = "twospectra", version, about = "Direct and inverse two-spectra problems for Jacobi matrices")]
pub struct Cli {
    /// Working precision in mantissa bits; 53 runs in hardware doubles.
    #[arg(long, global = true, default_value_t = 256, value_parser = parse_precision)]
    pub precision: u32,

    /// Write eigenvalue ladders and samples of the ratio function to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    pub emit_plot: Option<PathBuf>,

    /// Eigenvalues within this distance of zero are treated as zero.
    #[arg(long, global = true, value_name = "TOL")]
    pub zero_tol: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
#[group(multiple = false)]
pub struct HintArgs {
    /// First diagonal entry of the matrix.
    #[arg(long)]
    pub q1: Option<String>,
    /// Normalizing constant of the zero eigenvalue.
    #[arg(long)]
    pub alpha0: Option<String>,
    /// The perturbation parameter itself.
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectra of a matrix (or chain) and of its first-mass perturbation.
    Direct {
        input: PathBuf,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the matrix and theta from a spectra pair.
    Inverse {
        input: PathBuf,
        #[command(flatten)]
        hint: HintArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the admissibility gates on a spectra pair.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        hint: HintArgs,
    },
    /// Masses and springs of a matrix from a seed, or the admissible seed ratios.
    #[command(group(clap::ArgGroup::new("mode").required(true).args(["k1", "scan"])))]
    Masses {
        input: PathBuf,
        #[arg(long, requires = "m1")]
        k1: Option<String>,
        #[arg(long, requires = "k1")]
        m1: Option<String>,
        #[arg(long, conflicts_with_all = ["k1", "m1"])]
        scan: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Process every JSON file of a directory.
    Batch {
        dir: PathBuf,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_precision(text: &str) -> Result<u32, String> {
    let bits: u32 = text.parse().map_err(|_| format!("not an integer: {text}"))?;
    if PRECISIONS.contains(&bits) {
        Ok(bits)
    } else {
        Err(format!("supported precisions are {PRECISIONS:?}"))
    }
}

impl From<&HintArgs> for HintText {
    fn from(h: &HintArgs) -> Self {
        HintText {
            q1: h.q1.clone(),
            alpha0: h.alpha0.clone(),
            theta: h.theta.clone(),
        }
    }
}

fn execute<T: Scalar>(ctx: &Context, command: &Command) -> Outcome {
    match command {
        Command::Direct { input, theta, out } => commands::cmd_direct::<T>(ctx, input, theta, out.as_deref()),
        Command::Inverse { input, hint, out } => commands::cmd_inverse::<T>(ctx, input, &hint.into(), out.as_deref()),
        Command::Verify { input, hint } => commands::cmd_verify::<T>(ctx, input, &hint.into()),
        Command::Masses { input, k1, m1, scan, out } => {
            let mode = match (k1, m1, scan) {
                (Some(k1), Some(m1), false) => MassMode::Seed {
                    k1: k1.clone(),
                    m1: m1.clone(),
                },
                _ => MassMode::Scan,
            };
            commands::cmd_masses::<T>(input, &mode, out.as_deref())
        }
        Command::Batch { dir, theta, out } => commands::cmd_batch::<T>(ctx, dir, theta.as_deref(), out),
    }
}

/// Runs a parsed command line; diagnostics go to the error stream.
pub fn run(cli: Cli) -> ExitCode {
    let tolerance = match std::env::var(TOLERANCE_ENV) {
        Ok(text) => match text.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Some(t),
            _ => {
                eprintln!("error: {TOLERANCE_ENV} must be a positive number, got {text:?}");
                return ExitCode::from(1);
            }
        },
        Err(_) => None,
    };
    let ctx = Context {
        zero_tol: cli.zero_tol.clone(),
        tolerance,
        plot: cli.emit_plot.clone(),
    };
    let outcome = match cli.precision {
        53 => execute::<f64>(&ctx, &cli.command),
        128 => execute::<Mp<128>>(&ctx, &cli.command),
        256 => execute::<Mp<256>>(&ctx, &cli.command),
        512 => execute::<Mp<512>>(&ctx, &cli.command),
        1024 => execute::<Mp<1024>>(&ctx, &cli.command),
        other => Err(Failure::Input(format!("unsupported precision {other}"))),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}

/// Parses the process arguments; usage errors exit with 1, `--help` with 0.
pub fn main_entry() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
    }
}
