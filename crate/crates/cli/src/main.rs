use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod commands;

use commands::{CommandError, Outcome};

/// Exact r-removed perimeters, greedy orderings and greedoids over ultra triples.
#[derive(Parser, Debug)]
#[command(name = "ultragreedoid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load a triple file and run the ultrametric check.
    Validate(Common),
    /// r-removed distance from a point to a set.
    Dist {
        #[command(flatten)]
        common: Common,
        /// Comma-separated labels of C.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        set: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// r-removed perimeter of a set or sequence.
    Perimeter {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        set: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
        /// Treat --set as a sequence and accumulate along it.
        #[arg(long)]
        ordered: bool,
    },
    /// Greedy r-removed ordering of the ground set.
    Order {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        r: usize,
        /// Length of the ordering; defaults to every point.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = Ties::First)]
        ties: Ties,
    },
    /// Per-step gains of a greedy ordering.
    Signature {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Maximum-perimeter sets of every size up to --kmax.
    Maxsets(FamilyArgs),
    /// Check the greedoid axioms on the maximum-perimeter family.
    Greedoid(FamilyArgs),
    /// Build a greedy ordering that starts with a maximum-perimeter set.
    PrefixCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        set: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// Check the exchange and domination properties of a point-to-set distance.
    Props {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        functional: FunctionalArgs,
        /// Largest set size to enumerate.
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
    /// Recover level functions from a profile-only distance on the integers.
    Reconstruct {
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        mmax: usize,
        /// Comma-separated non-positive integers.
        #[arg(long, allow_hyphen_values = true, default_value = "-2,-1,0")]
        domain: String,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    /// Triple file (explicit or p-adic JSON).
    #[arg(long)]
    input: PathBuf,
    /// Recompute results with the brute-force oracles and embed the comparison.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    r: usize,
    /// Largest set size; defaults to every point.
    #[arg(long)]
    kmax: Option<usize>,
    /// Refuse ground sets above this many points.
    #[arg(long, default_value_t = ultragreedoid::greedoid::FAMILY_CAP)]
    cap: usize,
}

#[derive(Args, Debug)]
pub struct FunctionalArgs {
    #[arg(long, value_enum, default_value_t = DistKind::R)]
    dist: DistKind,
    /// Removal parameter for --dist r.
    #[arg(long, default_value_t = 0)]
    r: usize,
    /// Family file for --dist family.
    #[arg(long)]
    family: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Ties {
    First,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    /// r-removed distance.
    R,
    /// Distance to the nearest point.
    Nearest,
    /// Distance to the farthest point.
    Farthest,
    /// Level-function family read from --family.
    Family,
}

const USAGE: u8 = 64;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let mut digest = commands::Digest::default();
    let (report, status) = match commands::run(&cli.command, &mut digest) {
        Ok(Outcome {
            results,
            verification,
            sound,
        }) => {
            let status = if sound { 0 } else { 2 };
            if !sound {
                eprintln!("error: a result disagreed with the oracle or a theorem check failed");
            }
            (
                json!({
                    "command": argv,
                    "input_digest": digest.finish(),
                    "results": results,
                    "verification": verification.unwrap_or(Value::Null),
                    "exit_status": status,
                }),
                status,
            )
        }
        Err(err) => {
            let status = match err {
                CommandError::Falsified(_) => 2,
                _ => 1,
            };
            eprintln!("error: {err}");
            (
                json!({
                    "command": argv,
                    "input_digest": digest.finish(),
                    "error": err.to_string(),
                    "exit_status": status,
                }),
                status,
            )
        }
    };

    let mut text = serde_json::to_string_pretty(&report).expect("reports are plain JSON");
    text.push('\n');
    let mut out = std::io::stdout().lock();
    if out
        .write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .is_err()
    {
        return ExitCode::from(1);
    }
    ExitCode::from(status)
}
