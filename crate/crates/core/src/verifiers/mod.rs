//! Brute-force decision procedures for the stability notions, with witnesses
//! that can be replayed through independent predicates.

mod deviation;
mod replay;
mod restrained;

pub use deviation::{check_core, check_endowment_core, check_pb_core, core_deviation_holds};
pub use replay::replay_witness;
pub use restrained::{check_restrained_core, check_restrained_ejr};

use serde::{Deserialize, Serialize};

use crate::committee::Committee;
use crate::constraints::DEFAULT_SUBSET_CAP;
use crate::error::{self, Error, Result};
use crate::model::Instance;
use crate::rational::{self, Rational};
use crate::surd::Surd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    Core,
    RestrainedCore,
    RestrainedEjr,
    EndowmentCore,
    PbCore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Which sub-committees the non-deviating voters may keep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HatMode {
    /// `Ŵ ⊆ W` with `|Ŵ| ≤ k − k′`.
    #[default]
    SubsetOfW,
    /// Any `Ŵ` with `|Ŵ| ≤ k − k′`.
    AnyHatW,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// A coalition and the committee it deviates to.
    Deviation {
        coalition: Vec<usize>,
        committee: Committee,
    },
    /// A coalition with endowment `k_prime` and, for every admissible `Ŵ`,
    /// the `W′` it answers with.
    Restrained {
        coalition: Vec<usize>,
        k_prime: usize,
        certificate: Vec<CertificateEntry>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub kept: Committee,
    pub added: Committee,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub sets_enumerated: u64,
    pub coalitions_examined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub notion: Notion,
    #[serde(with = "rational::serde_q")]
    pub parameter: Rational,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub stats: Stats,
    /// Machine-readable markers such as vacuity of a coalition size.
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn coalition(&self) -> Option<&[usize]> {
        match &self.witness {
            Some(Witness::Deviation { coalition, .. })
            | Some(Witness::Restrained { coalition, .. }) => Some(coalition),
            None => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub hat_mode: HatMode,
    /// Only coalitions with `|S| ≥ fraction·n` may block.
    pub min_coalition_fraction: Option<Rational>,
    /// Require deviating committees of the plain core to lie in `P`.
    pub deviations_in_family: bool,
    /// Treat a committee-size instance as unit-size budgeting where needed.
    pub auto_lift: bool,
    pub max_voters: usize,
    pub max_candidates: usize,
    pub subset_cap: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            hat_mode: HatMode::SubsetOfW,
            min_coalition_fraction: None,
            deviations_in_family: false,
            auto_lift: false,
            max_voters: 10,
            max_candidates: 14,
            subset_cap: DEFAULT_SUBSET_CAP,
        }
    }
}

impl VerifyOptions {
    pub fn any_hat() -> Self {
        VerifyOptions {
            hat_mode: HatMode::AnyHatW,
            ..Default::default()
        }
    }

    pub fn min_fraction(alpha: Rational) -> Self {
        VerifyOptions {
            min_coalition_fraction: Some(alpha),
            ..Default::default()
        }
    }

    fn coalition_large_enough(&self, size: usize, n: usize) -> bool {
        self.min_coalition_fraction
            .as_ref()
            .is_none_or(|a| rational::from_usize(size) >= a * rational::from_usize(n))
    }
}

fn check_gamma(g: &Rational, what: &str) -> Result<()> {
    if *g < rational::int(1) {
        return Err(Error::Parameter(format!(
            "{what} must be at least 1, got {}",
            rational::format(g)
        )));
    }
    Ok(())
}

fn enumeration_guard(what: &'static str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(error::limit(what, needed, cap))
    } else {
        Ok(())
    }
}

fn voters_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Voter utilities, kept rational when every utility is rational-valued.
#[derive(Clone, Debug)]
enum Values {
    Rational(Vec<Rational>),
    Surd(Vec<Surd>),
}

impl Values {
    fn of(inst: &Instance, t: &Committee) -> Result<Values> {
        if inst.is_rational_valued() {
            inst.profile(t).map(Values::Rational)
        } else {
            inst.value_profile(t).map(Values::Surd)
        }
    }

    /// `γ·(u_i + 1)` for every voter.
    fn lifted(&self, gamma: &Rational) -> Values {
        let one = rational::int(1);
        match self {
            Values::Rational(v) => Values::Rational(v.iter().map(|u| (u + &one) * gamma).collect()),
            Values::Surd(v) => {
                Values::Surd(v.iter().map(|u| u.add_rational(&one).scale(gamma)).collect())
            }
        }
    }

    /// Bit `i` set iff voter `i` reaches `thresholds[i]`.
    fn reaching(&self, thresholds: &Values) -> u64 {
        let mut mask = 0u64;
        match (self, thresholds) {
            (Values::Rational(v), Values::Rational(t)) => {
                for (i, (a, b)) in v.iter().zip(t).enumerate() {
                    if a >= b {
                        mask |= 1 << i;
                    }
                }
            }
            (Values::Surd(v), Values::Surd(t)) => {
                for (i, (a, b)) in v.iter().zip(t).enumerate() {
                    if a >= b {
                        mask |= 1 << i;
                    }
                }
            }
            _ => unreachable!("values of one instance share a representation"),
        }
        mask
    }
}

/// Which voters of `inst` reach their threshold under `t`.
fn satisfied(inst: &Instance, t: &Committee, thresholds: &Values) -> Result<u64> {
    Ok(Values::of(inst, t)?.reaching(thresholds))
}

fn check_voter_count(inst: &Instance, limit: usize) -> Result<()> {
    let cap = limit.min(MAX_MASK_VOTERS);
    if inst.n() > cap {
        return Err(error::limit("voters", inst.n() as u128, cap as u128));
    }
    Ok(())
}

const MAX_MASK_VOTERS: usize = 63;
