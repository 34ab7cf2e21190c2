//! `rosen`: exact Rosen continued fractions from the command line.
//!
//! Every command writes one JSON document to stdout. Diagnostics and a
//! short human summary go to stderr. Exit codes: 0 success, 2 parse error,
//! 3 domain error, 4 internal error.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rosen_core::{ErrorKind, HeckeIndex};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "rosen",
    version,
    about = "Rosen continued fractions as paths in Farey graphs"
)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Hecke index: an integer q >= 3 or `inf`. A leading `q=<n>` argument
    /// or a `q=` prefix on a continued fraction works too.
    #[arg(long, global = true, value_name = "Q")]
    pub q: Option<HeckeIndex>,
    /// Convergence tolerance for `limit`.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Maximum number of terms for `limit`.
    #[arg(long = "max-n", global = true, default_value_t = 1000)]
    pub max_n: usize,
    /// Bits of precision behind every decimal rendering.
    #[arg(long = "precision-bits", global = true, default_value_t = 64)]
    pub precision_bits: u64,
    /// Machine mode: JSON on stdout only, no summary on stderr.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write an SVG figure (disc model) to this file.
    #[arg(long, global = true, value_name = "OUT")]
    pub svg: Option<PathBuf>,
    /// Cross-check fast answers against the brute-force oracle.
    #[arg(long, global = true)]
    pub oracle: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact value and convergents of a finite continued fraction.
    Eval {
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// Nearest-integer expansion of a vertex (a number or a continued fraction).
    Expand {
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// Decide whether a continued fraction is geodesic.
    Check {
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// Rewrite a continued fraction into a geodesic one with the same value.
    Reduce {
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// List every geodesic expansion of a vertex.
    Enumerate {
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// The chain of faces between two vertices (from ∞ if only one is given).
    Chain {
        #[arg(required = true, num_args = 1..=3)]
        args: Vec<String>,
    },
    /// Graph distance between two vertices.
    Distance {
        #[arg(required = true, num_args = 2..=3)]
        args: Vec<String>,
    },
    /// Convergence of an infinite (eventually periodic) continued fraction.
    Limit {
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// Draw the path of convergents of a continued fraction as SVG.
    Render {
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
        /// Shade the chain of faces from ∞ to the value as well.
        #[arg(long)]
        chain: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Expand { .. } => "expand",
            Command::Check { .. } => "check",
            Command::Reduce { .. } => "reduce",
            Command::Enumerate { .. } => "enumerate",
            Command::Chain { .. } => "chain",
            Command::Distance { .. } => "distance",
            Command::Limit { .. } => "limit",
            Command::Render { .. } => "render",
        }
    }
}

/// Failure of a command.
#[derive(Debug)]
pub enum CliError {
    Core(rosen_core::Error),
    Io(PathBuf, std::io::Error),
}

impl From<rosen_core::Error> for CliError {
    fn from(e: rosen_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn kind(&self) -> (&'static str, u8) {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Parse => ("parse", 2),
                ErrorKind::Domain => ("domain", 3),
                ErrorKind::Internal => ("internal", 4),
            },
            CliError::Io(..) => ("io", 3),
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(path, e) => format!("{}: {e}", path.display()),
        }
    }
}

/// What a command hands back for printing.
pub struct Report {
    pub q: HeckeIndex,
    pub inputs: Value,
    pub outputs: Value,
    pub summary: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let start = Instant::now();
    let opts = &cli.opts;
    let result = match &cli.command {
        Command::Eval { args } => commands::eval(opts, args),
        Command::Expand { args } => commands::expand(opts, args),
        Command::Check { args } => commands::check(opts, args),
        Command::Reduce { args } => commands::reduce(opts, args),
        Command::Enumerate { args } => commands::enumerate(opts, args),
        Command::Chain { args } => commands::chain(opts, args),
        Command::Distance { args } => commands::distance(opts, args),
        Command::Limit { args } => commands::limit(opts, args),
        Command::Render { args, chain } => commands::render(opts, args, *chain),
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(report) => {
            let doc = json!({
                "command": name,
                "q": report.q,
                "inputs": report.inputs,
                "outputs": report.outputs,
                "precision_bits": opts.precision_bits,
                "timing_ms": elapsed_ms,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            );
            if !opts.json {
                eprintln!("{}", report.summary);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (kind, code) = err.kind();
            let doc = json!({
                "command": name,
                "error": { "kind": kind, "message": err.message() },
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            );
            eprintln!("rosen {name}: {kind} error: {}", err.message());
            ExitCode::from(code)
        }
    }
}
