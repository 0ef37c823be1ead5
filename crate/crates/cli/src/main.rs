//! `sheafkit`: command-line access to the K-theory and E-theory engine.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation failure, 3 infeasible
//! result, 4 parse or I/O error.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sheafkit::algebra::CombInterval;
use sheafkit::etheory::Location;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Parse(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Parse(_) => 4,
        }
    }
}

impl From<sheafkit::Error> for Failure {
    fn from(e: sheafkit::Error) -> Self {
        use sheafkit::Error::*;
        match e {
            Range(_) => Failure::Usage(e.to_string()),
            Unsupported(_) | Undecided(_) => Failure::Infeasible(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "sheafkit", version, about = "K-theory sheaves and E-theory of elementary C[0,1]-algebras")]
struct Cli {
    /// Output format; defaults to $SHEAFKIT_OUTPUT, then text.
    #[arg(long, global = true, value_enum)]
    output: Option<Mode>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check an algebra file.
    Validate { file: PathBuf },
    /// K0 and K1 of the restriction to an interval.
    K {
        file: PathBuf,
        /// Combinatorial interval p:q; the whole of [0, 1] by default.
        #[arg(long)]
        interval: Option<CombInterval>,
    },
    /// The group E(A, B) of hom tuples.
    Hom {
        a: PathBuf,
        b: PathBuf,
        /// Compute through the boundary maps instead of the relations.
        #[arg(long)]
        via_delta: bool,
        /// Also print E^1.
        #[arg(long)]
        e1: bool,
    },
    /// E-groups from a skyscraper at a point or segment into B.
    Sky {
        #[arg(long)]
        d_rank: usize,
        /// x_i, seg_k, end0 or end1.
        #[arg(long)]
        at: Location,
        b: PathBuf,
        /// Assemble from the towers of neighbourhoods.
        #[arg(long)]
        via_tower: bool,
    },
    /// Restrict a tuple over one interval to a smaller one.
    Restrict {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        from: CombInterval,
        #[arg(long)]
        to: CombInterval,
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Compare E(Y ∪ Z) with the fiber product over Y ∩ Z.
    PullbackCheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        y: CombInterval,
        #[arg(long)]
        z: CombInterval,
    },
    /// t∘s for s: A -> B and t: B -> C.
    Compose {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        s: PathBuf,
        t: PathBuf,
    },
    /// The inverse of t: A -> B, if there is one.
    Invert { a: PathBuf, b: PathBuf, t: PathBuf },
    /// Insert a trivial singular point into a segment.
    Refine {
        file: PathBuf,
        #[arg(long)]
        segment: usize,
    },
    /// All μ: A -> B_small with ψ∘μ = α.
    Factor {
        a: PathBuf,
        b_small: PathBuf,
        b_big: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
    },
    /// Zigzag between two finite inductive systems.
    Intertwine { scenario: PathBuf },
    /// Compare lattice membership with brute-force enumeration.
    OracleCheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "box", default_value_t = 2)]
        box_size: u32,
    },
}

fn default_mode() -> Mode {
    match std::env::var("SHEAFKIT_OUTPUT").as_deref() {
        Ok("json") => Mode::Json,
        _ => Mode::Text,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mode = cli.output.unwrap_or_else(default_mode);
    match commands::run(cli.command, mode) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, failure)) => {
            print!("{out}");
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
