//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 for success or a passing verdict,
//! 1 for a failing verdict, 2 for usage, input or enumeration-cap errors.

mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;

use crate::committee::Committee;
use crate::error::Error;
use crate::interval::{self, DEFAULT_BITS};
use crate::rational::{self, Rational};
use crate::scoring::Rule;
use crate::suite::SuiteName;

pub use manifest::RunManifest;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "restrained", version, about = "Committee selection and stability checks with exact arithmetic")]
pub struct Cli {
    /// Worker threads for enumeration and sampling.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Record wall-clock time in the manifest.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a named instance.
    Gen(GenArgs),
    /// Compute a committee with the Global or Local solver.
    Solve(SolveArgs),
    /// Check a committee against a stability notion.
    Verify(VerifyArgs),
    /// Check the utility axioms, self-bounding and submodularity.
    CheckUtility(CheckUtilityArgs),
    /// Sampling experiments.
    Experiment(ExperimentArgs),
    /// Run a randomized property suite.
    TheoremSuite(SuiteArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenName {
    Xos,
    Rest1,
    #[value(name = "lb16-15")]
    Lb16_15,
    Lb00,
    Tight2a,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub name: GenName,
    /// Generator parameters as key=value pairs.
    #[arg(long, num_args = 1.., value_parser = parse_param)]
    pub params: Vec<(String, String)>,
    /// Instance destination; without it the instance goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Global,
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StartArg {
    Greedy,
    Random(u64),
    Given(Committee),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_rule)]
    pub rule: Rule,
    #[arg(long, value_enum, default_value = "global")]
    pub method: MethodArg,
    #[arg(long, value_parser = parse_rational, default_value = "0")]
    pub epsilon: Rational,
    /// `greedy`, `random:SEED`, or comma-separated candidate ids.
    #[arg(long, value_parser = parse_start, default_value = "greedy")]
    pub start: StartArg,
    #[arg(long)]
    pub max_iterations: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NotionArg {
    Core,
    RestrainedCore,
    Ejr,
    Endowment,
    PbCore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "subsetW")]
    SubsetW,
    #[value(name = "anyW")]
    AnyW,
}

/// A parsed `--gamma`: the rational used, plus a warning when it is an
/// over-approximation of an irrational value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaArg {
    pub value: Rational,
    pub warning: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub notion: NotionArg,
    /// `p/q`, a decimal, or `e^B`. Not used by `ejr`.
    #[arg(long, value_parser = parse_gamma)]
    pub gamma: Option<GammaArg>,
    #[arg(long, value_enum, default_value = "subsetW")]
    pub mode: ModeArg,
    /// Comma-separated candidate ids; empty for the empty committee.
    #[arg(long, value_parser = parse_committee, allow_hyphen_values = true)]
    pub committee: Committee,
    /// Only coalitions with at least this fraction of voters may block.
    #[arg(long, value_parser = parse_rational)]
    pub min_fraction: Option<Rational>,
    /// Require core deviations to be feasible.
    #[arg(long)]
    pub in_family: bool,
    /// Treat committee-size instances as unit-size budgeting.
    #[arg(long)]
    pub auto_lift: bool,
    #[arg(long, default_value_t = 10)]
    pub max_voters: usize,
    #[arg(long, default_value_t = 14)]
    pub max_candidates: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckUtilityArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Check one voter; all voters by default.
    #[arg(long)]
    pub voter: Option<usize>,
    /// Candidate ids to check over; all candidates by default.
    #[arg(long, value_parser = parse_committee)]
    pub universe: Option<Committee>,
    /// Also test `β`-self-bounding.
    #[arg(long, value_parser = parse_rational)]
    pub beta: Option<Rational>,
    /// Also test submodularity.
    #[arg(long)]
    pub submodular: bool,
    /// Check the axioms on this many seeded random `(T, j)` pairs instead
    /// of exhaustively.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    SamplingBound,
    LowerTail,
    Endow2,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub kind: ExperimentKind,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Voter whose utility is sampled.
    #[arg(long, default_value_t = 0)]
    pub voter: usize,
    /// The set `T`; all candidates by default.
    #[arg(long, value_parser = parse_committee)]
    pub set: Option<Committee>,
    #[arg(long, value_parser = parse_rational)]
    pub alpha: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    pub delta: Option<Rational>,
    #[arg(long, default_value_t = 1)]
    pub beta: u32,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Committee `W` for `endow2`.
    #[arg(long, value_parser = parse_committee)]
    pub committee: Option<Committee>,
    /// Coalition `S` for `endow2`, as voter ids.
    #[arg(long, value_parser = parse_committee)]
    pub coalition: Option<Committee>,
    #[arg(long, value_parser = parse_rational)]
    pub gamma: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    pub kappa: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    pub eta: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    pub q: Option<Rational>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, value_parser = parse_suite)]
    pub name: SuiteName,
    /// Number of random instances.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Seed of the first instance.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Local-search starts per instance.
    #[arg(long, default_value_t = 3)]
    pub starts: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<SuiteName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected key=value, got {s:?}")),
    }
}

/// Comma-separated ids; the empty string is the empty committee.
pub fn parse_committee(s: &str) -> Result<Committee, String> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Committee::empty());
    }
    t.split(',')
        .map(|id| {
            id.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid candidate id {id:?}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Committee::new)
}

fn parse_start(s: &str) -> Result<StartArg, String> {
    if s == "greedy" {
        return Ok(StartArg::Greedy);
    }
    if let Some(seed) = s.strip_prefix("random:") {
        return seed
            .parse()
            .map(StartArg::Random)
            .map_err(|_| format!("invalid seed {seed:?}"));
    }
    parse_committee(s).map(StartArg::Given)
}

/// Digits after the decimal point kept by the `e^B` over-approximation.
const E_POWER_DIGITS: u32 = 10;

/// The smallest multiple of `10^-10` that is provably at least `e^b`.
pub fn e_power_upper(b: &Rational) -> Rational {
    let hi = interval::exp_rational(b, DEFAULT_BITS).hi().clone();
    let scale = rational::pow(&rational::int(10), E_POWER_DIGITS);
    Rational::from_integer(rational::ceil(&(hi * &scale))) / scale
}

pub fn parse_gamma(s: &str) -> Result<GammaArg, String> {
    let t = s.trim();
    if let Some(b) = t.strip_prefix("e^") {
        let b = parse_rational(b)?;
        let value = e_power_upper(&b);
        let warning = format!(
            "gamma e^{} was replaced by the upper bound {}; a pass verdict carries over to e^{}, a fail verdict does not",
            rational::format(&b),
            rational::format(&value),
            rational::format(&b)
        );
        return Ok(GammaArg {
            value,
            warning: Some(warning),
        });
    }
    let value = parse_rational(t)?;
    if value.is_negative() {
        return Err("gamma must be non-negative".into());
    }
    Ok(GammaArg {
        value,
        warning: None,
    })
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Clap handles `--help` and `--version` with exit code 0.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    let flags = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let outcome = match cli.jobs {
        Some(0) => Err(commands::CliError::usage("--jobs must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::execute(&cli, flags)),
            Err(e) => Err(commands::CliError::usage(&e.to_string())),
        },
        None => commands::execute(&cli, flags),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            if let Some(advice) = &e.advisory {
                eprintln!("advisory: {advice}");
            }
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::e_upper;

    #[test]
    fn e_power_one_matches_the_fixed_bound() {
        assert_eq!(e_power_upper(&rational::int(1)), e_upper());
        let g = parse_gamma("e^2").unwrap();
        assert!(g.warning.is_some());
        assert!(interval::exp_rational(&rational::int(2), DEFAULT_BITS).hi() <= &g.value);
    }

    #[test]
    fn gamma_literals() {
        assert_eq!(parse_gamma("16/15").unwrap().value, rational::rat(16, 15));
        assert_eq!(parse_gamma("1.5").unwrap().value, rational::rat(3, 2));
        assert!(parse_gamma("1.5").unwrap().warning.is_none());
        assert!(parse_gamma("-1").is_err());
        assert!(parse_gamma("x").is_err());
    }

    #[test]
    fn committee_and_start_parsing() {
        assert_eq!(parse_committee("2, 0,1").unwrap(), Committee::new([0, 1, 2]));
        assert_eq!(parse_committee("").unwrap(), Committee::empty());
        assert!(parse_committee("a").is_err());
        assert_eq!(parse_start("random:7").unwrap(), StartArg::Random(7));
        assert_eq!(parse_start("3,1").unwrap(), StartArg::Given(Committee::new([1, 3])));
    }
}
