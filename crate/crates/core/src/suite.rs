//! Seeded property runs pairing a solver with a stability checker.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::committee::Committee;
use crate::error::{Error, Result};
use crate::instances::random::{random_instance, ConstraintKind, RandomSpec, UtilityKind};
use crate::model::Instance;
use crate::rational::{self, Rational};
use crate::scoring::Rule;
use crate::solvers::{solve_global, solve_local, LocalConfig, Start};
use crate::verifiers::{
    check_core, check_restrained_core, check_restrained_ejr, replay_witness, VerificationReport,
    VerifyOptions,
};

/// `2.7182818285 ≥ e`.
pub fn e_upper() -> Rational {
    rational::rat(27_182_818_285, 10_000_000_000)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    /// Global snw lies in the e-approximate restrained core.
    Main1,
    /// Local snw on partition matroids with coverage utilities lies in the
    /// 2-approximate restrained core.
    Matroid,
    /// Local pav on approval utilities and partition matroids satisfies
    /// restrained EJR.
    Ejr,
    /// Local gpav on additive utilities blocks no coalition of size at
    /// least αn at factor 2 − α.
    Tight,
}

impl SuiteName {
    pub const ALL: [SuiteName; 4] = [SuiteName::Main1, SuiteName::Matroid, SuiteName::Ejr, SuiteName::Tight];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Main1 => "main1",
            SuiteName::Matroid => "matroid",
            SuiteName::Ejr => "ejr",
            SuiteName::Tight => "tight",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite {s:?}")))
    }
}

/// One solver run and the check applied to its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCase {
    pub seed: u64,
    pub spec: RandomSpec,
    pub start: Option<String>,
    pub committee: Committee,
    pub report: VerificationReport,
    /// For failures, whether the witness replays.
    pub witness_replays: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: SuiteName,
    pub first_seed: u64,
    pub instances: u64,
    pub checks: u64,
    pub failures: Vec<SuiteCase>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const MAIN1_UTILITIES: [UtilityKind; 3] = [UtilityKind::Approval, UtilityKind::Additive, UtilityKind::Xos];

/// Instance shape for one seed: sizes drawn from the seed's generator,
/// utility and constraint kinds cycled by seed so every combination occurs.
pub fn suite_spec(name: SuiteName, seed: u64, rng: &mut ChaCha8Rng) -> RandomSpec {
    let n = rng.gen_range(2..=6);
    let m = rng.gen_range(2..=8);
    let k = rng.gen_range(1..=m.min(4));
    let (utility, constraint) = match name {
        SuiteName::Main1 => (
            MAIN1_UTILITIES[(seed % 3) as usize],
            ConstraintKind::ALL[((seed / 3) % 4) as usize],
        ),
        SuiteName::Matroid => (UtilityKind::Coverage, ConstraintKind::PartitionMatroid),
        SuiteName::Ejr => (UtilityKind::Approval, ConstraintKind::PartitionMatroid),
        SuiteName::Tight => (UtilityKind::Additive, ConstraintKind::None),
    };
    RandomSpec {
        n,
        m,
        k,
        utility,
        constraint,
    }
}

/// Starts used for Local: greedy plus seeded random bases.
fn starts(seed: u64, count: u64) -> Vec<Start> {
    std::iter::once(Start::Greedy)
        .chain((0..count.saturating_sub(1)).map(|j| Start::Random(seed.wrapping_mul(1000).wrapping_add(j))))
        .collect()
}

fn start_label(s: &Start) -> String {
    match s {
        Start::Greedy => "greedy".into(),
        Start::Given(w) => format!("given:{w}"),
        Start::Random(x) => format!("random:{x}"),
    }
}

fn record(
    report: &mut SuiteReport,
    inst: &Instance,
    case: (u64, RandomSpec, Option<String>, Committee),
    rep: VerificationReport,
    opts: &VerifyOptions,
) -> Result<()> {
    report.checks += 1;
    if rep.failed() {
        let replays = replay_witness(inst, &case.3, &rep, opts)?;
        report.failures.push(SuiteCase {
            seed: case.0,
            spec: case.1,
            start: case.2,
            committee: case.3,
            report: rep,
            witness_replays: Some(replays),
        });
    }
    Ok(())
}

pub const TIGHT_ALPHAS: [(i64, i64); 3] = [(1, 4), (1, 2), (1, 1)];

/// Runs `name` over seeds `first_seed .. first_seed + count`. Local runs
/// use `starts_per_instance` starts (greedy first).
pub fn run_suite(name: SuiteName, first_seed: u64, count: u64, starts_per_instance: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        name,
        first_seed,
        instances: 0,
        checks: 0,
        failures: Vec::new(),
    };
    for seed in first_seed..first_seed + count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = suite_spec(name, seed, &mut rng);
        let inst = random_instance(&spec, &mut rng)?;
        report.instances += 1;
        let default = VerifyOptions::default();
        match name {
            SuiteName::Main1 => {
                let w = solve_global(&inst, Rule::Snw)?.committee;
                let rep = check_restrained_core(&inst, &w, &e_upper(), &default)?;
                record(&mut report, &inst, (seed, spec, None, w), rep, &default)?;
            }
            SuiteName::Matroid | SuiteName::Ejr | SuiteName::Tight => {
                let rule = match name {
                    SuiteName::Matroid => Rule::Snw,
                    SuiteName::Ejr => Rule::Pav,
                    _ => Rule::Gpav,
                };
                for start in starts(seed, starts_per_instance) {
                    let config = LocalConfig {
                        start: start.clone(),
                        ..Default::default()
                    };
                    let w = solve_local(&inst, rule, &config)?.committee;
                    let label = Some(start_label(&start));
                    match name {
                        SuiteName::Matroid => {
                            let rep = check_restrained_core(&inst, &w, &rational::int(2), &default)?;
                            record(&mut report, &inst, (seed, spec, label, w), rep, &default)?;
                        }
                        SuiteName::Ejr => {
                            let rep = check_restrained_ejr(&inst, &w, &default)?;
                            record(&mut report, &inst, (seed, spec, label, w), rep, &default)?;
                        }
                        _ => {
                            for (p, q) in TIGHT_ALPHAS {
                                let alpha = rational::rat(p, q);
                                let gamma = rational::int(2) - &alpha;
                                let opts = VerifyOptions::min_fraction(alpha);
                                let rep = check_core(&inst, &w, &gamma, &opts)?;
                                record(&mut report, &inst, (seed, spec, label.clone(), w.clone()), rep, &opts)?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}
