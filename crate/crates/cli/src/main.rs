//! Command-line interface: load a hypergroup from a JSON spec file, run
//! verification sweeps and synthesis reports, emit JSON.
//!
//! Exit codes: 0 all checks pass, 1 a check failed (or a recurrence was
//! rejected with a witness), 2 malformed input, 3 inconclusive rank
//! stabilization.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod schema;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input or bad flag combination (exit 2).
    #[error("{0}")]
    Usage(String),
    /// A mathematical check failed (exit 1).
    #[error("{0}")]
    Check(String),
    /// Rank stabilization was inconclusive (exit 3).
    #[error("{0}")]
    Inconclusive(String),
}

impl CliError {
    pub fn from_core(e: polyhg::Error) -> CliError {
        match &e {
            polyhg::Error::NegativeCoefficient { .. } => CliError::Check(e.to_string()),
            polyhg::Error::RankUnstable { .. } => CliError::Inconclusive(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }

    pub fn from_parse(e: polyhg::Error) -> CliError {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Inconclusive(_) => 3,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Debug)]
pub struct Common {
    /// Hypergroup spec file (JSON)
    #[arg(long)]
    pub spec: PathBuf,

    /// Sweep box: coordinates range over 0..=box
    #[arg(long = "box", default_value_t = 12)]
    pub box_n: usize,

    /// exact (zero-tolerance rational arithmetic) or float
    #[arg(long, default_value = "exact")]
    pub mode: String,

    /// Relative tolerance for float mode
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,

    /// Seed for every randomized sweep
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for the verification sweep
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    /// Write the JSON report here (summary goes to stdout); without it the
    /// JSON itself is printed
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Parser)]
#[command(
    name = "polyhg",
    about = "Exact computer algebra on discrete polynomial hypergroups",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the hypergroup axioms on a box
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Print the convolution measure of two point masses
    Conv {
        #[command(flatten)]
        common: Common,
        /// First point, comma-separated (e.g. "1,1")
        #[arg(long)]
        x: String,
        /// Second point
        #[arg(long)]
        y: String,
    },
    /// Fourier-Laplace transform of a measure (or its inverse)
    Fourier {
        #[command(flatten)]
        common: Common,
        /// Measure file to transform
        #[arg(long)]
        measure: Option<PathBuf>,
        /// Polynomial file to invert into a measure
        #[arg(long)]
        invert: Option<PathBuf>,
    },
    /// Sweep a functional equation over the box
    CheckEq {
        #[command(flatten)]
        common: Common,
        /// exponential | sine | moment | degree
        #[arg(long)]
        kind: String,
        /// Point λ, comma-separated scalars ("1/2,-3/4"; decimals = float)
        #[arg(long)]
        lambda: Option<String>,
        /// Exponential's point when it differs from --lambda
        #[arg(long = "m-lambda")]
        m_lambda: Option<String>,
        /// Sine direction coefficients (kind = sine)
        #[arg(long)]
        coeffs: Option<String>,
        /// Moment family order cap, e.g. "2,2" (kind = moment)
        #[arg(long)]
        cap: Option<String>,
        /// Function file (kind = degree)
        #[arg(long)]
        function: Option<PathBuf>,
        /// Degree to certify (kind = degree)
        #[arg(long)]
        degree: Option<usize>,
        /// Random tuples sampled for the degree check
        #[arg(long, default_value_t = 16)]
        trials: usize,
    },
    /// Smallest n with all (n+1)-fold modified differences vanishing
    Degree {
        #[command(flatten)]
        common: Common,
        /// Function file
        #[arg(long)]
        function: PathBuf,
        /// Exponential's point; defaults to the function's own point
        #[arg(long)]
        lambda: Option<String>,
        /// Upper bound for the search
        #[arg(long = "n-max", default_value_t = 8)]
        n_max: usize,
        /// Random tuples spot-checking each candidate level
        #[arg(long, default_value_t = 16)]
        trials: usize,
    },
    /// Decompose an exponential polynomial into moment functions
    Synth {
        #[command(flatten)]
        common: Common,
        /// Seed function file
        #[arg(long)]
        function: Option<PathBuf>,
        /// Operator polynomial file: the seed becomes P(∂)Q(λ)
        #[arg(long)]
        pdo: Option<PathBuf>,
        /// Point λ for --pdo
        #[arg(long)]
        lambda: Option<String>,
        /// Variety sample box (defaults to the symbolic policy)
        #[arg(long = "variety-box")]
        variety_box: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let common = match &cli.cmd {
        Cmd::Verify { common }
        | Cmd::Conv { common, .. }
        | Cmd::Fourier { common, .. }
        | Cmd::CheckEq { common, .. }
        | Cmd::Degree { common, .. }
        | Cmd::Synth { common, .. } => common,
    };
    if common.box_n == 0 {
        return Err(CliError::Usage("--box must be at least 1".into()));
    }
    if common.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    match &cli.cmd {
        Cmd::Verify { common } => commands::cmd_verify(common),
        Cmd::Conv { common, x, y } => commands::cmd_conv(common, x, y),
        Cmd::Fourier {
            common,
            measure,
            invert,
        } => commands::cmd_fourier(common, measure.as_deref(), invert.as_deref()),
        Cmd::CheckEq {
            common,
            kind,
            lambda,
            m_lambda,
            coeffs,
            cap,
            function,
            degree,
            trials,
        } => commands::cmd_check_eq(
            common,
            kind,
            lambda.as_deref(),
            m_lambda.as_deref(),
            coeffs.as_deref(),
            cap.as_deref(),
            function.as_deref(),
            *degree,
            *trials,
        ),
        Cmd::Degree {
            common,
            function,
            lambda,
            n_max,
            trials,
        } => commands::cmd_degree(common, function, lambda.as_deref(), *n_max, *trials),
        Cmd::Synth {
            common,
            function,
            pdo,
            lambda,
            variety_box,
        } => commands::cmd_synth(
            common,
            function.as_deref(),
            pdo.as_deref(),
            lambda.as_deref(),
            *variety_box,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
