//! `rigiscope`: batch rigidity analysis of framework files.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "rigiscope",
    version,
    about = "First-order rigidity of bar-and-joint frameworks"
)]
struct Cli {
    /// Absolute tolerance for membership and domain checks.
    #[arg(long, global = true, env = "RIGISCOPE_TOL")]
    tol: Option<f64>,

    /// Relative singular-value cutoff for numeric rank.
    #[arg(long = "rank-eps", global = true)]
    rank_eps: Option<f64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verdict record: ranks, motion and stress dimensions, singular values.
    Analyze { files: Vec<PathBuf> },
    /// Structural and membership checks without analysis.
    Validate { files: Vec<PathBuf> },
    /// Export the rigidity matrix (JSON or CSV).
    Matrix { file: PathBuf },
    /// Basis of first-order motions, split into trivial and internal.
    Motions { file: PathBuf },
    /// Basis of self-stresses.
    Stresses { file: PathBuf },
    /// Move a framework into another geometry.
    Transfer {
        file: PathBuf,
        /// Target model: euclidean, sphere_ambient, proj_sphere, proj_hyperbolic,
        /// proj_exterior_hyperbolic, hyperboloid or de_sitter.
        #[arg(long)]
        to: String,
    },
    /// Factorization, rank and stress-subspace comparison across geometries.
    VerifyEquivalence { file: PathBuf },
    /// Cone a spherical framework into Euclidean space one dimension up.
    Cone { file: PathBuf },
    /// Convert between a D^n framework and a hyperplane angle system.
    Polar {
        file: PathBuf,
        /// Keep angle constraints between ultraparallel hyperplanes.
        #[arg(long)]
        formal: bool,
    },
    /// Stiffness verdict of an angle system (or of the polar of a D^n framework).
    Stiffness {
        file: PathBuf,
        #[arg(long)]
        formal: bool,
    },
    /// Emit a canonical example framework, or list them when no name is given.
    Examples {
        name: Option<String>,
        /// Geometry of the emitted framework.
        #[arg(long, default_value = "euclidean")]
        to: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("rigiscope: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

impl Cli {
    fn tolerance(&self) -> Result<rigiscope::Tolerance, Failure> {
        let mut tol = rigiscope::Tolerance::default();
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Failure::usage(format!("--tol must be positive, got {t}")));
            }
            tol.abs = t;
        }
        if let Some(e) = self.rank_eps {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Failure::usage(format!(
                    "--rank-eps must be positive, got {e}"
                )));
            }
            tol.rank_eps = e;
        }
        Ok(tol)
    }
}
