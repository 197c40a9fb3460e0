//! `norm1lat`: classify norm one tori with dihedral Galois closure, replay the
//! explicit constructions, and print cohomology tables and resolutions.

mod commands;
mod job;
mod render;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use norm1lat::certify::DEFAULT_SEARCH_BOUND;
use norm1lat::groups::DEFAULT_MAX_GROUP_ORDER;
use norm1lat::paperdihedral::CaseId;
use norm1lat::Error;

#[derive(Parser, Debug)]
#[command(name = "norm1lat", version, about, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Read the command and its flags from a JSON job file
    #[arg(long, global = true, value_name = "FILE")]
    pub job: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Largest group order for which subgroup lattices are enumerated
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_GROUP_ORDER)]
    pub max_group_order: usize,

    /// Coefficient bound for isomorphism searches
    #[arg(long, global = true, default_value_t = DEFAULT_SEARCH_BOUND)]
    pub search_bound: i64,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "NORM1LAT_THREADS")]
    pub threads: Option<usize>,

    /// Include wall-clock timings in reports (makes output nondeterministic)
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide rationality of the norm one torus for K = L^H
    Classify {
        /// e.g. `dihedral:n=6` or `perms:a=(1 2 3);b=(1 2)`
        #[arg(long)]
        group: String,
        /// e.g. `<x*y>`; `1` for the Galois case
        #[arg(long, default_value = "1")]
        subgroup: String,
    },
    /// Rebuild one of the explicit dihedral constructions and check every claim
    VerifyPaper {
        /// main-i, main-ii, appendix-galois or appendix-c2
        #[arg(long)]
        case: CaseId,
        #[arg(long)]
        n: usize,
    },
    /// Tate cohomology of a lattice over subgroups
    Cohomology {
        #[arg(long)]
        group: String,
        /// Summands joined by `+`: `Z`, `Z^r`, `P:<H>`, `I:<H>`, `J:<H>`, `dual(...)`
        #[arg(long)]
        lattice: String,
        /// A subgroup, or `all` for one per conjugacy class; repeatable
        #[arg(long, default_values_t = [String::from("all")])]
        subgroup: Vec<String>,
        /// Degrees among -1, 0, 1
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1, 0, 1])]
        degree: Vec<i32>,
    },
    /// Flabby resolution 0 -> M -> P -> F -> 0, by default of J_{G/H}
    Resolve {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "1")]
        subgroup: String,
        /// Lattice to resolve instead of J_{G/H}
        #[arg(long)]
        lattice: Option<String>,
        /// Search F + Z^pad = sum of Z[G/U] over these subgroups, separated by `;`
        #[arg(long)]
        target: Option<String>,
        /// Trivial summands added to F (default: rank difference)
        #[arg(long)]
        pad: Option<usize>,
    },
    /// Quick end-to-end check of the library
    Selftest,
}

pub struct Outcome {
    pub value: serde_json::Value,
    /// Some claim failed or a certificate was rejected.
    pub failed: bool,
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::ResourceBound { .. }) => 3,
        Some(Error::Parse(_) | Error::Parameter(_) | Error::NotSubgroup(_) | Error::InvalidGroup(_)) => 2,
        Some(_) => 1,
        None if e.downcast_ref::<job::JobError>().is_some() => 2,
        None => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<(Outcome, Format)> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    let format = cli.format;
    let command = cli.command.as_ref().ok_or(job::JobError("no command given".into()))?;
    Ok((commands::execute(command, &cli)?, format))
}

fn main() -> ExitCode {
    let mut args: Vec<OsString> = std::env::args_os().collect();
    match job::expand(&args) {
        Ok(Some(expanded)) => args = expanded,
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((out, format)) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.value).expect("json")),
                Format::Text => print!("{}", render::text(&out.value)),
            }
            ExitCode::from(u8::from(out.failed))
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
