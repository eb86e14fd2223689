use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use xprod_core::algebra::NormMode;

use crate::commands::{self, CastleArgs, CompareFlags, Options, Session, TzsArgs, TzsMap};
use crate::error::CliError;
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "xprod", version, about = "Normalizers, subequivalence and castle maps in finite crossed products")]
pub struct Cli {
    /// System file (JSON).
    #[arg(long, global = true)]
    pub system: Option<PathBuf>,
    /// Exact arithmetic first, floats only where unavoidable (default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Report norms in floating point.
    #[arg(long, global = true)]
    pub float: bool,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Cap on enumerated candidates in searches.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget: usize,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Include wall-clock runtime in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a system: freeness, minimality, orbits, invariant measures.
    SystemCheck,
    /// Decide a ≼ b for diagonal tuples such as `chi:0,1|fn:2=1/2`.
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Emit the witness.
        #[arg(long)]
        witness: bool,
        /// Emit the d_τ table for every extreme invariant measure.
        #[arg(long)]
        semigroup: bool,
        /// Also evaluate the blockwise-rank Cuntz comparison.
        #[arg(long)]
        oracle: bool,
    },
    /// Compile witnesses into r-normalizers and back.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Castles, castle order zero maps and TZS instances.
    #[command(subcommand)]
    Castle(CastleCommand),
    /// Type semigroup tables up to tuples of length N.
    Semigroup {
        #[arg(long)]
        max_n: usize,
    },
}

#[derive(Debug, Args)]
pub struct Pair {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub epsilon: String,
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    Compile {
        #[command(flatten)]
        pair: Pair,
        /// Witness file; searched for when absent.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    Extract {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        delta: String,
        /// Matrix file holding `t`.
        #[arg(long)]
        t: PathBuf,
    },
    Roundtrip {
        #[command(flatten)]
        pair: Pair,
        /// Also run the ε-grid equivalence suite.
        #[arg(long)]
        suite: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum CastleCommand {
    Validate {
        /// Castle file; the orbit castle when absent.
        #[arg(long)]
        castle: Option<PathBuf>,
        /// Check the almost-finiteness conditions at this δ.
        #[arg(long)]
        delta: Option<String>,
        /// Comma-separated group labels for K; all of G by default.
        #[arg(long)]
        k: Option<String>,
        /// Require singleton bases.
        #[arg(long)]
        strict: bool,
    },
    BuildOzm {
        #[arg(long)]
        data: PathBuf,
    },
    Decompose {
        #[arg(long, conflicts_with = "data")]
        ozm: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    Tzs {
        #[arg(long, group = "map")]
        ozm: Option<PathBuf>,
        #[arg(long, group = "map")]
        data: Option<PathBuf>,
        /// Use `M_|G| ≅ C(X) ⋊ G` for a free transitive system.
        #[arg(long, group = "map")]
        identity: bool,
        /// Search castle maps with indicator weights.
        #[arg(long, group = "map")]
        search: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        epsilon: String,
        /// Element specs (`unit`, `u:<g>`, `chi:<pts>`, `@file`), repeatable.
        #[arg(long)]
        family: Vec<String>,
        #[arg(long)]
        h: String,
    },
}

fn path(p: &std::path::Path) -> String {
    p.to_string_lossy().into_owned()
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let system = cli.system.as_ref().ok_or_else(|| CliError::parse("--system", "a system file is required"))?;
    let opts = Options {
        mode: if cli.float { NormMode::Float } else { NormMode::ExactFirst },
        tolerance: cli.tolerance,
        budget: cli.budget,
        timing: cli.timing,
    };
    let s = Session::open(&path(system), opts)?;
    let report = match &cli.command {
        Command::SystemCheck => commands::system_check(s)?,
        Command::Compare { a, b, witness, semigroup, oracle } => {
            commands::compare(s, a, b, CompareFlags { witness: *witness, semigroup: *semigroup, oracle: *oracle })?
        }
        Command::Witness(WitnessCommand::Compile { pair, witness }) => {
            let w = witness.as_deref().map(path);
            commands::witness_compile(s, &pair.a, &pair.b, &pair.epsilon, w.as_deref())?
        }
        Command::Witness(WitnessCommand::Extract { pair, delta, t }) => {
            commands::witness_extract(s, &pair.a, &pair.b, &pair.epsilon, delta, &path(t))?
        }
        Command::Witness(WitnessCommand::Roundtrip { pair, suite }) => {
            commands::witness_roundtrip(s, &pair.a, &pair.b, &pair.epsilon, *suite)?
        }
        Command::Castle(CastleCommand::Validate { castle, delta, k, strict }) => {
            let castle = castle.as_deref().map(path);
            let args = CastleArgs { castle: castle.as_deref(), delta: delta.as_deref(), k: k.as_deref(), strict: *strict };
            commands::castle_validate(s, args)?
        }
        Command::Castle(CastleCommand::BuildOzm { data }) => commands::castle_build_ozm(s, &path(data))?,
        Command::Castle(CastleCommand::Decompose { ozm, data }) => {
            let (ozm, data) = (ozm.as_deref().map(path), data.as_deref().map(path));
            commands::castle_decompose(s, ozm.as_deref(), data.as_deref())?
        }
        Command::Castle(CastleCommand::Tzs { ozm, data, identity, search, n, epsilon, family, h }) => {
            let (ozm, data) = (ozm.as_deref().map(path), data.as_deref().map(path));
            let map = match (ozm.as_deref(), data.as_deref(), identity, search) {
                (Some(p), ..) => TzsMap::Ozm(p),
                (None, Some(p), ..) => TzsMap::Data(p),
                (None, None, true, _) => TzsMap::Identity,
                (None, None, false, true) => TzsMap::Search,
                _ => return Err(CliError::parse("map", "one of --ozm, --data, --identity or --search is required")),
            };
            commands::castle_tzs(s, TzsArgs { map, n: *n, epsilon, family, h })?
        }
        Command::Semigroup { max_n } => commands::semigroup(s, *max_n)?,
    };
    if let Some(out) = &cli.json {
        std::fs::write(out, report.to_json()).map_err(|source| CliError::Write { path: path(out), source })?;
    }
    Ok(report)
}
