//! Command-line front end: compute single primitives, verify one identity at
//! one parameter point, sweep an identity across a grid, or enumerate group
//! types. Reports come out as text, JSON, or CSV, always with exact
//! `num/den` rationals.
//!
//! Exit codes: 0 on success, 1 when any verification failed, 2 on usage or
//! validation errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::chains::{s_plus_value, s_value, sigma_i};
use crate::error::{Error, Result};
use crate::group_types::{
    aut_order, enumerate_order_exponent, enumerate_rank_tower, surj_count, weight,
    weight_of_order, GroupType, RankConstraint,
};
use crate::qseries::{eval_at, gauss_binomial, poch, PrimeEll};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::report::{reports_to_csv, reports_to_json, reports_to_text, VerificationReport};
use crate::subgroup_count::sub_count;
use crate::verifier::{
    standard_grid, sweep, GridOptions, GridPoint, IdentityId, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "ellq",
    version,
    about = "Exact arithmetic for finite abelian ell-group averages and q-series identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a single primitive value.
    Compute(ComputeArgs),
    /// Check one identity at one parameter point.
    Verify(VerifyArgs),
    /// Check an identity across a parameter grid.
    Sweep(SweepArgs),
    /// List the group types of a rank-constrained or fixed-order family.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(subcommand)]
    what: ComputeWhat,
}

#[derive(Subcommand)]
enum ComputeWhat {
    /// |Aut A|, the automorphism order of a group type.
    Aut {
        #[arg(long = "type")]
        group_type: String,
        #[arg(long)]
        ell: Option<String>,
    },
    /// sub(A, B): the number of subgroups of B isomorphic to A.
    Sub {
        #[arg(long = "type-a")]
        type_a: String,
        #[arg(long = "type-b")]
        type_b: String,
        #[arg(long)]
        ell: Option<String>,
    },
    /// |Surj(Z^i, A)|: surjections from a free module of rank i.
    Surj {
        #[arg(long)]
        i: u32,
        #[arg(long = "type")]
        group_type: String,
        #[arg(long)]
        ell: Option<String>,
    },
    /// The i-weight of a group type.
    Weight {
        #[arg(long)]
        i: u32,
        #[arg(long = "type")]
        group_type: String,
        #[arg(long)]
        ell: Option<String>,
    },
    /// The i-weight of the order ell^j (summed over all types of that order).
    WeightOrder {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        ell: Option<String>,
    },
    /// The signed chain sum S(A, B).
    S {
        #[arg(long = "type-a")]
        type_a: String,
        #[arg(long = "type-b")]
        type_b: String,
        #[arg(long)]
        ell: Option<String>,
    },
    /// The unsigned chain sum S_plus(A, B).
    SPlus {
        #[arg(long = "type-a")]
        type_a: String,
        #[arg(long = "type-b")]
        type_b: String,
        #[arg(long)]
        ell: Option<String>,
    },
    /// The truncated chain sum sigma_i(A) at parts <= max-exponent.
    Sigma {
        #[arg(long = "type")]
        group_type: String,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        ell: Option<String>,
        #[arg(long = "max-exponent", default_value_t = 8)]
        max_exponent: u32,
    },
    /// The product (q)_i as a polynomial in q, or its value at q = 1/ell.
    Poch {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        ell: Option<String>,
    },
    /// The Gaussian binomial [k choose m]_q, or its value at q = 1/ell.
    Qbinom {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        ell: Option<String>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: subg4, subg5, converge3, converge4, autid, ell2, sagain, q1,
    /// qme, hall, weight-sum.
    identity: String,
    /// Base group type A as comma-separated parts ("[]" for the trivial one).
    #[arg(long = "type")]
    group_type: Option<String>,
    /// Chain length / two-rank index, where the identity takes one.
    #[arg(long)]
    i: Option<u32>,
    /// k parameter of q1 / qme.
    #[arg(long)]
    k: Option<u32>,
    /// m parameter of qme.
    #[arg(long)]
    m: Option<u32>,
    /// Rank parameter of weight-sum.
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    ell: Option<String>,
    /// Truncation: largest allowed part of the summed types.
    #[arg(long = "max-exponent", default_value_t = 8)]
    max_exponent: u32,
    /// Order-exponent truncation of the hall sum.
    #[arg(long = "sum-bound", default_value_t = 12)]
    sum_bound: u32,
    /// Factor truncation of the hall product.
    #[arg(long = "prod-bound", default_value_t = 40)]
    prod_bound: u32,
    /// Absolute tolerance as an exact rational.
    #[arg(long, default_value = "1/1000")]
    tol: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Identity to sweep; see `verify` for the list.
    identity: String,
    /// Comma-separated odd primes, e.g. "3,5".
    #[arg(long, default_value = "3")]
    ell: String,
    /// Largest rank of the swept base types.
    #[arg(long = "max-rank", default_value_t = 2)]
    max_rank: u32,
    /// Largest part of the swept base types.
    #[arg(long = "max-part", default_value_t = 2)]
    max_part: u32,
    /// Largest chain length / padding index for subg5 and autid.
    #[arg(long = "max-i", default_value_t = 2)]
    max_index: u32,
    /// Largest k for q1 / qme.
    #[arg(long = "max-k", default_value_t = 25)]
    max_k: u32,
    /// Largest m for qme.
    #[arg(long = "max-m", default_value_t = 20)]
    max_m: u32,
    #[arg(long = "max-exponent", default_value_t = 8)]
    max_exponent: u32,
    /// Order-exponent truncation of the hall sum (hall uses this as E).
    #[arg(long = "sum-bound", default_value_t = 12)]
    sum_bound: u32,
    #[arg(long = "prod-bound", default_value_t = 40)]
    prod_bound: u32,
    #[arg(long, default_value = "1/1000")]
    tol: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Rank tower prefix, e.g. "2,1" for rank 2 with second rank 1.
    #[arg(long = "rank-tower", conflicts_with = "order_exponent")]
    rank_tower: Option<String>,
    /// List all types of order ell^j instead.
    #[arg(long = "order-exponent")]
    order_exponent: Option<u32>,
    /// Largest allowed part (rank-tower mode).
    #[arg(long = "max-exponent", default_value_t = 8)]
    max_exponent: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Runs the CLI on the given argument list and returns the process exit code
/// (0 = success, 1 = a verification failed, 2 = usage or validation error).
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(error) => {
            return match error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{error}");
                    0
                }
                _ => {
                    eprint!("{error}");
                    2
                }
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Compute(args) => compute(args),
        Command::Verify(args) => verify(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Enumerate(args) => enumerate(args),
    }
}

fn parse_ell(flag: Option<&str>) -> Result<PrimeEll> {
    let text = match flag {
        Some(text) => text.to_string(),
        None => std::env::var("ELLQ_ELL")
            .map_err(|_| Error::Precondition("missing --ell (or ELLQ_ELL)".to_string()))?,
    };
    let value: BigUint = text
        .trim()
        .parse()
        .map_err(|_| Error::InvalidPrime(text.clone()))?;
    PrimeEll::new(value)
}

fn parse_ell_list(text: &str) -> Result<Vec<PrimeEll>> {
    text.split(',')
        .map(|token| parse_ell(Some(token)))
        .collect()
}

fn parse_type(text: &str) -> Result<GroupType> {
    text.parse()
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<u8> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(content.as_bytes());
        }
    }
    Ok(0)
}

fn compute(args: ComputeArgs) -> Result<u8> {
    let line = match &args.what {
        ComputeWhat::Aut { group_type, ell } => {
            let a = parse_type(group_type)?;
            let ell = parse_ell(ell.as_deref())?;
            aut_order(&a, &ell).to_string()
        }
        ComputeWhat::Sub { type_a, type_b, ell } => {
            let a = parse_type(type_a)?;
            let b = parse_type(type_b)?;
            let ell = parse_ell(ell.as_deref())?;
            sub_count(&a, &b, &ell).to_string()
        }
        ComputeWhat::Surj { i, group_type, ell } => {
            let a = parse_type(group_type)?;
            let ell = parse_ell(ell.as_deref())?;
            surj_count(*i, &a, &ell).to_string()
        }
        ComputeWhat::Weight { i, group_type, ell } => {
            let a = parse_type(group_type)?;
            let ell = parse_ell(ell.as_deref())?;
            format_rational(&weight(*i, &a, &ell))
        }
        ComputeWhat::WeightOrder { i, j, ell } => {
            let ell = parse_ell(ell.as_deref())?;
            format_rational(&weight_of_order(*i, *j, &ell))
        }
        ComputeWhat::S { type_a, type_b, ell } => {
            let a = parse_type(type_a)?;
            let b = parse_type(type_b)?;
            let ell = parse_ell(ell.as_deref())?;
            s_value(&a, &b, &ell).to_string()
        }
        ComputeWhat::SPlus { type_a, type_b, ell } => {
            let a = parse_type(type_a)?;
            let b = parse_type(type_b)?;
            let ell = parse_ell(ell.as_deref())?;
            s_plus_value(&a, &b, &ell).to_string()
        }
        ComputeWhat::Sigma {
            group_type,
            i,
            ell,
            max_exponent,
        } => {
            let a = parse_type(group_type)?;
            let ell = parse_ell(ell.as_deref())?;
            format_rational(&sigma_i(&a, *i, &ell, *max_exponent)?)
        }
        ComputeWhat::Poch { i, ell } => match ell {
            Some(ell) => format_rational(&eval_at(&poch(*i), &parse_ell(Some(ell))?)),
            None => poch(*i).to_string(),
        },
        ComputeWhat::Qbinom { k, m, ell } => match ell {
            Some(ell) => format_rational(&eval_at(&gauss_binomial(*k, *m), &parse_ell(Some(ell))?)),
            None => gauss_binomial(*k, *m).to_string(),
        },
    };
    println!("{line}");
    Ok(0)
}

fn require<T>(value: Option<T>, what: &str, identity: IdentityId) -> Result<T> {
    value.ok_or_else(|| Error::Precondition(format!("{identity} requires {what}")))
}

fn verify(args: VerifyArgs) -> Result<u8> {
    let identity: IdentityId = args.identity.parse()?;
    let tolerance = parse_and_check_tolerance(&args.tol)?;
    let parsed_type = match &args.group_type {
        Some(text) => Some(parse_type(text)?),
        None => None,
    };
    let report = match identity {
        IdentityId::Subg4 => {
            let a = require(parsed_type, "--type", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_subg4(&a, &ell, args.max_exponent, &tolerance)?
        }
        IdentityId::Subg5 => {
            let a = require(parsed_type, "--type", identity)?;
            let i = require(args.i, "--i", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_subg5(&a, i, &ell, args.max_exponent, &tolerance)?
        }
        IdentityId::Converge3 => {
            let a = require(parsed_type, "--type", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_converge3(&a, &ell, args.max_exponent, &tolerance)?
        }
        IdentityId::Converge4 => {
            let a = require(parsed_type, "--type", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_converge4(&a, &ell, args.max_exponent, &tolerance)?
        }
        IdentityId::Autid => {
            let a = require(parsed_type, "--type", identity)?;
            let i = require(args.i, "--i", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_autid(&a, i, &ell)?
        }
        IdentityId::Ell2 => {
            let a = require(parsed_type, "--type", identity)?;
            let i = require(args.i, "--i", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_ell2(&a, i, &ell, args.max_exponent, &tolerance)?
        }
        IdentityId::Sagain => {
            let a = require(parsed_type, "--type", identity)?;
            let i = require(args.i, "--i", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_sagain(&a, i, &ell, args.max_exponent, &tolerance)?
        }
        IdentityId::Q1 => {
            let k = require(args.k, "--k", identity)?;
            crate::qseries::check_q1(k)?
        }
        IdentityId::Qme => {
            let m = require(args.m, "--m", identity)?;
            let k = require(args.k, "--k", identity)?;
            crate::qseries::check_qme(m, k)
        }
        IdentityId::Hall => {
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_hall(&ell, args.sum_bound, args.prod_bound, &tolerance)?
        }
        IdentityId::WeightSum => {
            let r = require(args.r, "--r", identity)?;
            let ell = parse_ell(args.ell.as_deref())?;
            crate::verifier::verify_weight_sum(r, &ell, args.max_exponent, &tolerance)?
        }
    };
    let passed = report.passed;
    emit_reports(&[report], args.format, args.output.as_ref())?;
    Ok(if passed { 0 } else { 1 })
}

fn parse_and_check_tolerance(text: &str) -> Result<Rational> {
    use num_traits::Signed;
    let tolerance = parse_rational(text)?;
    if tolerance.is_negative() {
        return Err(Error::Precondition(format!(
            "tolerance must be nonnegative, got {text}"
        )));
    }
    Ok(tolerance)
}

fn run_sweep(args: SweepArgs) -> Result<u8> {
    let identity: IdentityId = args.identity.parse()?;
    let tolerance = parse_and_check_tolerance(&args.tol)?;
    let ells = if identity.uses_ell() {
        parse_ell_list(&args.ell)?
    } else {
        Vec::new()
    };
    let options = GridOptions {
        max_rank: args.max_rank,
        max_part: args.max_part,
        max_index: args.max_index,
        max_k: args.max_k,
        max_m: args.max_m,
    };
    let points: Vec<GridPoint> = standard_grid(identity, &options);
    let spec = SweepSpec {
        identity,
        ells,
        points,
        max_exponent: if identity == IdentityId::Hall {
            args.sum_bound
        } else {
            args.max_exponent
        },
        prod_bound: args.prod_bound,
        tolerance,
    };
    let outcome = sweep(&spec)?;
    for error in &outcome.errors {
        eprintln!("sweep point failed: {error}");
    }
    emit_reports(&outcome.reports, args.format, args.output.as_ref())?;
    Ok(if outcome.passed { 0 } else { 1 })
}

fn emit_reports(
    reports: &[VerificationReport],
    format: OutputFormat,
    output: Option<&PathBuf>,
) -> Result<u8> {
    let content = match format {
        OutputFormat::Text => reports_to_text(reports),
        OutputFormat::Json => {
            let mut json = if reports.len() == 1 {
                reports[0].to_json()
            } else {
                reports_to_json(reports)
            };
            json.push('\n');
            json
        }
        OutputFormat::Csv => reports_to_csv(reports),
    };
    emit(output, &content)
}

fn enumerate(args: EnumerateArgs) -> Result<u8> {
    let types = match (&args.rank_tower, args.order_exponent) {
        (Some(tower_text), None) => {
            let tower: Vec<u32> = tower_text
                .split(',')
                .map(|token| {
                    token
                        .trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Precondition(format!("bad rank tower `{tower_text}`")))
                })
                .collect::<Result<_>>()?;
            let constraint = RankConstraint::new(tower)?;
            enumerate_rank_tower(&constraint, args.max_exponent)?
        }
        (None, Some(j)) => enumerate_order_exponent(j),
        _ => {
            return Err(Error::Precondition(
                "exactly one of --rank-tower / --order-exponent is required".to_string(),
            ))
        }
    };
    let content = match args.format {
        OutputFormat::Text => {
            let mut out = String::new();
            for group_type in &types {
                out.push_str(&group_type.to_string());
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let mut json =
                serde_json::to_string(&types).expect("type list serialization cannot fail");
            json.push('\n');
            json
        }
        OutputFormat::Csv => {
            let mut out = String::from("parts\n");
            for group_type in &types {
                out.push_str(&format!("\"{group_type}\"\n"));
            }
            out
        }
    };
    emit(args.output.as_ref(), &content)
}
