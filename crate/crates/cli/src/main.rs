mod commands;
mod error;
mod gallery;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{CliError, EXIT_USAGE};

/// Analysis of marginal DAG models: separation, projection, fixing,
/// equivalence classes, classification and a discrete-distribution oracle.
#[derive(Parser, Debug)]
#[command(name = "mdagkit", version)]
pub struct Cli {
    /// Seed for sampled models (oracle commands use seed, seed+1, ...).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Numerical tolerance for independence and inequality checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Largest skeleton whose orientations are enumerated for PAGs and classes.
    #[arg(long, global = true, default_value_t = mdag::equivalence::DEFAULT_MAX_EDGES)]
    pub max_edges: usize,

    /// Emit JSON (with a `schema` field) instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a graph file against the mDAG invariants.
    Validate { file: PathBuf },
    /// m-separation of A and B given C (exit 0 separated, 1 connected).
    Msep(SepArgs),
    /// e-separation of A and B given C after deleting D (exit 0 separated, 1 connected).
    Esep {
        #[command(flatten)]
        sep: SepArgs,
        /// Vertices to delete, comma separated.
        #[arg(long = "del", value_name = "D", default_value = "")]
        del: String,
    },
    /// Latent projection onto a subset of the vertices.
    Project {
        file: PathBuf,
        /// Vertices to keep, comma separated.
        #[arg(long)]
        keep: String,
    },
    /// Canonical DAG: one latent parent per facet.
    Canonical { file: PathBuf },
    /// Maximal ancestral graph with the same m-separations.
    Mag { file: PathBuf },
    /// Partial ancestral graph of the MAG's equivalence class.
    Pag { file: PathBuf },
    /// Markov equivalence class of the graph's MAG.
    Class {
        file: PathBuf,
        /// Print every member of the class.
        #[arg(long)]
        list_members: bool,
    },
    /// Fix one vertex.
    Fix {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
    },
    /// Nested independences revealed by fixing (always JSON).
    Nested { file: PathBuf },
    /// Model class (exit 10 DAG_EQUIVALENT, 11 INEQUALITY_ONLY, 12 NONDAG_CI, 13 NESTED).
    Classify { file: PathBuf },
    /// Exact discrete-distribution checks on sampled models.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run every .mdag file in a directory against its .expect.json sidecar.
    Gallery { dir: PathBuf },
}

#[derive(Args, Debug)]
pub struct SepArgs {
    pub file: PathBuf,
    /// Comma-separated vertex set.
    #[arg(long = "a", value_name = "A")]
    pub a: String,
    /// Comma-separated vertex set.
    #[arg(long = "b", value_name = "B")]
    pub b: String,
    /// Comma-separated conditioning set (empty by default).
    #[arg(long = "c", value_name = "C", default_value = "")]
    pub c: String,
    /// Print one open path when the sets are connected.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    pub file: PathBuf,
    /// One cardinality for every vertex, or a comma-separated list in vertex order.
    #[arg(long, default_value = "2")]
    pub cards: String,
    /// Number of models, seeded from --seed upward.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Sample marginal distributions; print them, or check every m-separation.
    Sample {
        #[command(flatten)]
        sample: SampleArgs,
        /// Check each implied independence instead of printing distributions
        /// (exit 1 if any fails).
        #[arg(long)]
        check_msep: bool,
    },
    /// CHSH expression on sampled binary models.
    Chsh {
        #[command(flatten)]
        sample: SampleArgs,
        /// Setting, outcome, setting, outcome: a,b,c,d.
        #[arg(long)]
        roles: String,
    },
    /// Independence A ⊥ B | C after fixing a vertex with a uniform kernel (exit 1 if it fails).
    Verma {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        fix: String,
        #[arg(long = "a", value_name = "A")]
        a: String,
        #[arg(long = "b", value_name = "B")]
        b: String,
        #[arg(long = "c", value_name = "C", default_value = "")]
        c: String,
    },
}

/// Text printed to stdout and the process exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("mdagkit: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("try `mdagkit --help`");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
