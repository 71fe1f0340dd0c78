use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::committee::Committee;
use crate::error::Error;
use crate::instances::{gen_lb00, gen_lb_16_15, gen_rest1, gen_tight_2alpha, gen_xos_example};
use crate::model::{
    check_axioms_with, check_submodular, is_self_bounding, self_bounding_constant, AxiomPolicy,
    AxiomReport, CheckBudget, Instance, SelfBoundingCheck, SubmodularCheck,
    DEFAULT_EXHAUSTIVE_LIMIT,
};
use crate::rational::{self, Rational, Q};
use crate::sampling::{
    endow2_reduction_experiment, exact_sample_expectation, mc_lower_tail, verify_sampling_bound,
    Endow2Params, Endow2Report, TailReport, TailVerdict,
};
use crate::scoring::Rule;
use crate::solvers::{solve_global, solve_local, LocalConfig, Start};
use crate::suite::run_suite;
use crate::verifiers::{
    check_core, check_endowment_core, check_pb_core, check_restrained_core, check_restrained_ejr,
    HatMode, VerifyOptions,
};

use super::manifest::{Report, RunManifest};
use super::{
    CheckUtilityArgs, Cli, Command, ExperimentArgs, ExperimentKind, GenArgs, GenName, MethodArg,
    ModeArg, NotionArg, SolveArgs, StartArg, SuiteArgs, VerifyArgs, EXIT_FAIL, EXIT_PASS,
};

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub advisory: Option<String>,
}

impl CliError {
    pub fn usage(message: &str) -> Self {
        CliError {
            message: message.to_string(),
            advisory: None,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let advisory = match &e {
            Error::EnumerationLimit { .. } => Some(
                "the brute-force check is exponential; shrink the instance or raise \
                 --max-voters/--max-candidates if the machine can afford it"
                    .to_string(),
            ),
            _ => None,
        };
        CliError {
            message: e.to_string(),
            advisory,
        }
    }
}

type Outcome = Result<i32, CliError>;

struct Session {
    manifest: RunManifest,
    started: Instant,
    timing: bool,
}

impl Session {
    fn load(&mut self, path: &Path, policy: AxiomPolicy) -> Result<Instance, CliError> {
        let bytes = fs::read(path)
            .map_err(|e| CliError::usage(&format!("cannot read {}: {e}", path.display())))?;
        self.manifest.record_input(path, &bytes);
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::usage(&format!("{}: not UTF-8", path.display())))?;
        Instance::from_json_str(&text, policy).map_err(|e| {
            let mut err = CliError::from(e);
            err.message = format!("{}: {}", path.display(), err.message);
            err
        })
    }

    fn finish<T: Serialize>(mut self, body: &T, dest: Option<&Path>, code: i32) -> Outcome {
        self.manifest.exit_status = code;
        if self.timing {
            self.manifest.wall_clock_ms = Some(self.started.elapsed().as_millis() as u64);
        }
        let report = Report {
            body,
            manifest: &self.manifest,
        };
        let mut text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
        text.push('\n');
        write_out(dest, &text)?;
        Ok(code)
    }
}

fn write_out(dest: Option<&Path>, text: &str) -> Result<(), CliError> {
    match dest {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::usage(&format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(&format!("cannot write to stdout: {e}"))),
    }
}

fn verdict_code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub fn execute(cli: &Cli, flags: Vec<String>) -> Outcome {
    let name = match &cli.command {
        Command::Gen(_) => "gen",
        Command::Solve(_) => "solve",
        Command::Verify(_) => "verify",
        Command::CheckUtility(_) => "check-utility",
        Command::Experiment(_) => "experiment",
        Command::TheoremSuite(_) => "theorem-suite",
    };
    let session = Session {
        manifest: RunManifest::new(name, flags),
        started: Instant::now(),
        timing: cli.timing,
    };
    match &cli.command {
        Command::Gen(a) => gen(session, a),
        Command::Solve(a) => solve(session, a),
        Command::Verify(a) => verify(session, a),
        Command::CheckUtility(a) => check_utility(session, a),
        Command::Experiment(a) => experiment(session, a),
        Command::TheoremSuite(a) => theorem_suite(session, a),
    }
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn new(pairs: &[(String, String)]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if map.insert(k.clone(), v.clone()).is_some() {
                return Err(CliError::usage(&format!("parameter {k} given twice")));
            }
        }
        Ok(Params(map))
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T, CliError> {
        match self.0.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| CliError::usage(&format!("invalid value {v:?} for parameter {key}"))),
            None => default.ok_or_else(|| CliError::usage(&format!("missing parameter {key}"))),
        }
    }

    fn rational(&mut self, key: &str) -> Result<Rational, CliError> {
        match self.0.remove(key) {
            Some(v) => rational::parse(&v).map_err(CliError::from),
            None => Err(CliError::usage(&format!("missing parameter {key}"))),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        match self.0.keys().next() {
            Some(k) => Err(CliError::usage(&format!("unknown parameter {k}"))),
            None => Ok(()),
        }
    }
}

#[derive(Serialize)]
struct GenOutput {
    name: &'static str,
    n: usize,
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    out: String,
}

fn gen(session: Session, a: &GenArgs) -> Outcome {
    let mut p = Params::new(&a.params)?;
    let (name, inst) = match a.name {
        GenName::Xos => ("xos", gen_xos_example(p.take("k", Some(3))?)?),
        GenName::Rest1 => {
            let q = p.take("q", Some(2))?;
            let voters = p.take("voters", Some(1))?;
            ("rest1", gen_rest1(q, voters)?.instance)
        }
        GenName::Lb16_15 => ("lb16-15", gen_lb_16_15(p.take("r", None)?)?),
        GenName::Lb00 => {
            let beta = p.take("beta", Some(2))?;
            ("lb00", gen_lb00(beta, p.take("r", None)?)?)
        }
        GenName::Tight2a => {
            let alpha = p.rational("alpha")?;
            let eps = p.rational("eps")?;
            ("tight2a", gen_tight_2alpha(&alpha, &eps)?.instance)
        }
    };
    p.finish()?;
    let mut json = inst.to_json_string()?;
    json.push('\n');
    match &a.out {
        None => {
            write_out(None, &json)?;
            Ok(EXIT_PASS)
        }
        Some(path) => {
            write_out(Some(path), &json)?;
            let body = GenOutput {
                name,
                n: inst.n(),
                m: inst.m(),
                k: inst.k(),
                out: path.display().to_string(),
            };
            session.finish(&body, None, EXIT_PASS)
        }
    }
}

#[derive(Serialize)]
struct ScoreOutput {
    rule: Rule,
    /// Exact value; for snw the product `Π(1 + u_i)`.
    value: Q,
    /// `Σ ln(1 + u_i)` for snw, display only.
    #[serde(skip_serializing_if = "Option::is_none")]
    ln: Option<f64>,
}

#[derive(Serialize)]
struct SolveOutput {
    method: &'static str,
    committee: Committee,
    score: ScoreOutput,
    iterations: u64,
}

fn solve(mut session: Session, a: &SolveArgs) -> Outcome {
    let inst = session.load(&a.input, AxiomPolicy::Check)?;
    let solution = match a.method {
        MethodArg::Global => solve_global(&inst, a.rule)?,
        MethodArg::Local => {
            let start = match &a.start {
                StartArg::Greedy => Start::Greedy,
                StartArg::Random(seed) => {
                    session.manifest.seed = Some(*seed);
                    Start::Random(*seed)
                }
                StartArg::Given(w) => Start::Given(w.clone()),
            };
            let config = LocalConfig {
                epsilon: a.epsilon.clone(),
                start,
                max_iterations: a.max_iterations,
            };
            solve_local(&inst, a.rule, &config)?
        }
    };
    let body = SolveOutput {
        method: match a.method {
            MethodArg::Global => "global",
            MethodArg::Local => "local",
        },
        score: ScoreOutput {
            rule: solution.score.rule,
            ln: (solution.score.rule == Rule::Snw).then(|| solution.score.display_value()),
            value: Q(solution.score.value.clone()),
        },
        committee: solution.committee,
        iterations: solution.iterations,
    };
    session.finish(&body, a.out.as_deref(), EXIT_PASS)
}

fn verify(mut session: Session, a: &VerifyArgs) -> Outcome {
    let inst = session.load(&a.input, AxiomPolicy::Check)?;
    let opts = VerifyOptions {
        hat_mode: match a.mode {
            ModeArg::SubsetW => HatMode::SubsetOfW,
            ModeArg::AnyW => HatMode::AnyHatW,
        },
        min_coalition_fraction: a.min_fraction.clone(),
        deviations_in_family: a.in_family,
        auto_lift: a.auto_lift,
        max_voters: a.max_voters,
        max_candidates: a.max_candidates,
        ..Default::default()
    };
    let gamma = match (&a.gamma, a.notion) {
        (_, NotionArg::Ejr) => None,
        (Some(g), _) => Some(g),
        (None, _) => return Err(CliError::usage("--gamma is required for this notion")),
    };
    let value = gamma.map(|g| g.value.clone()).unwrap_or_default();
    let w = &a.committee;
    let mut report = match a.notion {
        NotionArg::Core => check_core(&inst, w, &value, &opts)?,
        NotionArg::RestrainedCore => check_restrained_core(&inst, w, &value, &opts)?,
        NotionArg::Ejr => check_restrained_ejr(&inst, w, &opts)?,
        NotionArg::Endowment => check_endowment_core(&inst, w, &value, &opts)?,
        NotionArg::PbCore => check_pb_core(&inst, w, &value, &opts)?,
    };
    if let Some(warning) = gamma.and_then(|g| g.warning.clone()) {
        report.notes.push(warning);
    }
    let code = verdict_code(report.passed());
    session.finish(&report, a.report.as_deref(), code)
}

#[derive(Serialize)]
struct VoterCheck {
    voter: usize,
    kind: &'static str,
    axioms: AxiomReport,
    /// Smallest `β` for which the utility is `β`-self-bounding.
    #[serde(skip_serializing_if = "Option::is_none")]
    self_bounding_constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_bounding: Option<SelfBoundingCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    submodular: Option<SubmodularCheck>,
    holds: bool,
}

#[derive(Serialize)]
struct UtilityCheckOutput {
    universe: Committee,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<Q>,
    voters: Vec<VoterCheck>,
    holds: bool,
}

fn check_utility(mut session: Session, a: &CheckUtilityArgs) -> Outcome {
    let inst = session.load(&a.input, AxiomPolicy::Trust)?;
    let universe = a.universe.clone().unwrap_or_else(|| inst.all_candidates());
    if let Some(bad) = universe.iter().find(|&c| c >= inst.m()) {
        return Err(CliError::usage(&format!("candidate {bad} is out of range")));
    }
    let voters: Vec<usize> = match a.voter {
        Some(i) if i >= inst.n() => {
            return Err(CliError::usage(&format!("voter {i} is out of range")))
        }
        Some(i) => vec![i],
        None => (0..inst.n()).collect(),
    };
    let budget = match a.samples {
        Some(samples) => {
            session.manifest.seed = Some(a.seed);
            CheckBudget::Sampled {
                samples,
                seed: a.seed,
            }
        }
        None => CheckBudget::default(),
    };
    let exhaustive = a.samples.is_none() && universe.len() <= DEFAULT_EXHAUSTIVE_LIMIT;
    let ids = universe.as_slice();
    let mut checks = Vec::with_capacity(voters.len());
    for i in voters {
        let u = inst.utility(i);
        let axioms = check_axioms_with(u, ids, budget)?;
        let self_bounding_constant = if exhaustive {
            Some(self_bounding_constant(u, ids)?.to_string())
        } else {
            None
        };
        let self_bounding = match &a.beta {
            Some(beta) => Some(is_self_bounding(u, ids, beta)?),
            None => None,
        };
        let submodular = if a.submodular {
            Some(check_submodular(u, ids)?)
        } else {
            None
        };
        let holds = axioms.holds()
            && self_bounding.as_ref().is_none_or(|c| c.holds)
            && submodular.as_ref().is_none_or(|c| c.holds);
        checks.push(VoterCheck {
            voter: i,
            kind: u.kind_name(),
            axioms,
            self_bounding_constant,
            self_bounding,
            submodular,
            holds,
        });
    }
    let holds = checks.iter().all(|c| c.holds);
    let body = UtilityCheckOutput {
        universe,
        beta: a.beta.clone().map(Q),
        voters: checks,
        holds,
    };
    session.finish(&body, a.report.as_deref(), verdict_code(holds))
}

#[derive(Serialize)]
struct SamplingBoundOutput {
    voter: usize,
    set: Committee,
    alpha: Q,
    beta: u32,
    /// `E[u(O)]`, exact.
    expectation: String,
    expectation_decimal: f64,
    /// `α^β u(T)`, exact.
    threshold: String,
    holds: bool,
}

#[derive(Serialize)]
struct TailOutput {
    voter: usize,
    set: Committee,
    alpha: Q,
    delta: Q,
    beta: u32,
    #[serde(flatten)]
    tail: TailReport,
}

#[derive(Serialize)]
struct Endow2Output {
    committee: Committee,
    coalition: Committee,
    set: Committee,
    params: Endow2Params,
    #[serde(flatten)]
    result: Endow2Report,
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::usage(&format!("--{flag} is required for this experiment")))
}

fn experiment(mut session: Session, a: &ExperimentArgs) -> Outcome {
    let inst = session.load(&a.input, AxiomPolicy::Check)?;
    let set = a.set.clone().unwrap_or_else(|| inst.all_candidates());
    inst.check_committee(&set)?;
    match a.kind {
        ExperimentKind::SamplingBound => {
            let u = voter_utility(&inst, a.voter)?;
            let alpha = required(&a.alpha, "alpha")?;
            let holds = verify_sampling_bound(u, &set, alpha, a.beta)?;
            let expectation = exact_sample_expectation(u, &set, alpha)?;
            let threshold = u.value(&set)?.scale(&rational::pow(alpha, a.beta));
            let body = SamplingBoundOutput {
                voter: a.voter,
                alpha: Q(alpha.clone()),
                beta: a.beta,
                expectation_decimal: expectation.to_f64(),
                expectation: expectation.to_string(),
                threshold: threshold.to_string(),
                set,
                holds,
            };
            session.finish(&body, a.report.as_deref(), verdict_code(holds))
        }
        ExperimentKind::LowerTail => {
            let u = voter_utility(&inst, a.voter)?;
            let alpha = required(&a.alpha, "alpha")?;
            let delta = required(&a.delta, "delta")?;
            session.manifest.seed = Some(a.seed);
            let tail = mc_lower_tail(u, &set, alpha, delta, a.beta, a.trials, a.seed)?;
            let code = verdict_code(tail.verdict != TailVerdict::Fail);
            let body = TailOutput {
                voter: a.voter,
                set,
                alpha: Q(alpha.clone()),
                delta: Q(delta.clone()),
                beta: a.beta,
                tail,
            };
            session.finish(&body, a.report.as_deref(), code)
        }
        ExperimentKind::Endow2 => {
            let w = required(&a.committee, "committee")?;
            let coalition = required(&a.coalition, "coalition")?;
            let params = Endow2Params {
                gamma: required(&a.gamma, "gamma")?.clone(),
                kappa: required(&a.kappa, "kappa")?.clone(),
                eta: required(&a.eta, "eta")?.clone(),
                q: required(&a.q, "q")?.clone(),
                beta: a.beta,
                trials: a.trials,
                seed: a.seed,
            };
            if let Some(bad) = coalition.iter().find(|&i| i >= inst.n()) {
                return Err(CliError::usage(&format!("voter {bad} is out of range")));
            }
            session.manifest.seed = Some(a.seed);
            let result =
                endow2_reduction_experiment(&inst, w, coalition.as_slice(), &set, &params)?;
            let code = verdict_code(result.joint_occurred);
            let body = Endow2Output {
                committee: w.clone(),
                coalition: coalition.clone(),
                set,
                params,
                result,
            };
            session.finish(&body, a.report.as_deref(), code)
        }
    }
}

fn voter_utility(inst: &Instance, i: usize) -> Result<&crate::model::UtilityFunction, CliError> {
    if i >= inst.n() {
        return Err(CliError::usage(&format!("voter {i} is out of range")));
    }
    Ok(inst.utility(i))
}

fn theorem_suite(mut session: Session, a: &SuiteArgs) -> Outcome {
    session.manifest.seed = Some(a.seed);
    let report = run_suite(a.name, a.seed, a.seeds, a.starts)?;
    let code = verdict_code(report.passed());
    session.finish(&report, a.report.as_deref(), code)
}
