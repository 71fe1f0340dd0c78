//! The pav, snw and gpav scoring rules and their marginals, all exact.
//!
//! snw is represented by the product `Π_i (1 + u_i(W))`, which orders
//! committees exactly as `Σ_i ln(1 + u_i(W))` does.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::committee::Committee;
use crate::error::{Error, Result};
use crate::interval::{self, DEFAULT_BITS};
use crate::model::Instance;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Pav,
    Snw,
    Gpav,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Pav => "pav",
            Rule::Snw => "snw",
            Rule::Gpav => "gpav",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        match s {
            "pav" => Ok(Rule::Pav),
            "snw" => Ok(Rule::Snw),
            "gpav" => Ok(Rule::Gpav),
            _ => Err(Error::Parameter(format!("unknown rule {s:?}"))),
        }
    }
}

/// A score under one rule; for snw the value is the product comparable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Score {
    pub rule: Rule,
    pub value: Rational,
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.rule == other.rule).then(|| self.value.cmp(&other.value))
    }
}

impl Score {
    /// `Σ_i ln(1 + u_i)` for snw, the value itself otherwise. Display only.
    pub fn display_value(&self) -> f64 {
        match self.rule {
            Rule::Snw if self.value.is_positive() => {
                interval::ln_rational(&self.value, 64).midpoint_f64()
            }
            _ => rational::to_f64(&self.value),
        }
    }
}

/// `Φ(x) = H(⌊x⌋) + (x − ⌊x⌋)/⌈x⌉`, with `Φ(0) = 0`.
pub fn phi(x: &Rational) -> Rational {
    let fl = rational::floor(x);
    let frac = x - Rational::from_integer(fl.clone());
    let whole = rational::harmonic(fl.try_into().unwrap_or(0u64));
    if frac.is_zero() {
        whole
    } else {
        whole + frac / Rational::from_integer(rational::ceil(x))
    }
}

fn check_nonneg(u: &Rational) -> Result<()> {
    if u.is_negative() {
        Err(Error::RuleMismatch(format!(
            "negative utility {}",
            rational::format(u)
        )))
    } else {
        Ok(())
    }
}

/// Contribution of one voter with utility `u`: `H(u)`, `1 + u` or `Φ(u)`.
pub fn voter_term(rule: Rule, u: &Rational) -> Result<Rational> {
    check_nonneg(u)?;
    match rule {
        Rule::Pav => {
            if !u.is_integer() {
                return Err(Error::RuleMismatch(format!(
                    "pav needs integer utilities, got {}",
                    rational::format(u)
                )));
            }
            Ok(rational::harmonic(rational::floor(u).try_into().unwrap_or(0u64)))
        }
        Rule::Snw => Ok(Rational::one() + u),
        Rule::Gpav => Ok(phi(u)),
    }
}

/// Combines per-voter utilities into a score.
pub fn score_profile(rule: Rule, profile: &[Rational]) -> Result<Score> {
    let mut value = match rule {
        Rule::Snw => Rational::one(),
        _ => Rational::zero(),
    };
    for u in profile {
        let t = voter_term(rule, u)?;
        match rule {
            Rule::Snw => value *= t,
            _ => value += t,
        }
    }
    Ok(Score { rule, value })
}

pub fn score(rule: Rule, inst: &Instance, w: &Committee) -> Result<Score> {
    inst.check_committee(w)?;
    score_profile(rule, &inst.profile(w)?)
}

/// Per-voter marginals and their aggregate. For pav and gpav these are
/// differences and the total is their sum; for snw they are ratios
/// `(1 + u_i(after)) / (1 + u_i(before))` and the total is their product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marginal {
    pub rule: Rule,
    pub per_voter: Vec<Rational>,
    pub total: Rational,
}

fn marginal_between(
    rule: Rule,
    inst: &Instance,
    lower: &Committee,
    upper: &Committee,
) -> Result<Marginal> {
    let lo = inst.profile(lower)?;
    let hi = inst.profile(upper)?;
    let mut per_voter = Vec::with_capacity(lo.len());
    for (a, b) in lo.iter().zip(&hi) {
        let ta = voter_term(rule, a)?;
        let tb = voter_term(rule, b)?;
        per_voter.push(match rule {
            Rule::Snw => tb / ta,
            _ => tb - ta,
        });
    }
    let total = match rule {
        Rule::Snw => per_voter.iter().fold(Rational::one(), |acc, x| acc * x),
        _ => per_voter.iter().fold(Rational::zero(), |acc, x| acc + x),
    };
    Ok(Marginal {
        rule,
        per_voter,
        total,
    })
}

/// `Δ_{i,c}(W)` and `Δ_c(W)` for `c ∉ W`.
pub fn marginal_add(rule: Rule, inst: &Instance, w: &Committee, c: usize) -> Result<Marginal> {
    inst.check_committee(&w.with(c))?;
    if w.contains(c) {
        return Err(Error::Membership(format!("candidate {c} is already in {w}")));
    }
    marginal_between(rule, inst, w, &w.with(c))
}

/// `∇_{i,c}(W)` and `∇_c(W)` for `c ∈ W`.
pub fn marginal_remove(rule: Rule, inst: &Instance, w: &Committee, c: usize) -> Result<Marginal> {
    inst.check_committee(w)?;
    if !w.contains(c) {
        return Err(Error::Membership(format!("candidate {c} is not in {w}")));
    }
    marginal_between(rule, inst, &w.without(c), w)
}

/// `Δ*_{S,c}(W) = Σ_{i∈S} u_i(c) / (u_i(W) + 1)` for additive utilities.
pub fn delta_star(inst: &Instance, w: &Committee, c: usize, s: &[usize]) -> Result<Rational> {
    inst.check_committee(&w.with(c))?;
    let mut acc = Rational::zero();
    for &i in s {
        let u = inst.utility(i);
        if u.additive_weights(0).is_none() {
            return Err(Error::RuleMismatch(format!(
                "delta_star needs additive utilities, voter {i} is {}",
                u.kind_name()
            )));
        }
        let uc = u.evaluate(&Committee::new([c]))?;
        let uw = u.evaluate(w)?;
        acc += uc / (uw + Rational::one());
    }
    Ok(acc)
}

/// Whether `ratio > e^x` for rational `x`, decided with interval arithmetic
/// at increasing precision. The two sides are never equal when `x ≠ 0`
/// because `e^x` is irrational.
pub fn ratio_exceeds_exp(ratio: &Rational, x: &Rational) -> bool {
    if x.is_zero() {
        return *ratio > Rational::one();
    }
    let mut bits = DEFAULT_BITS;
    loop {
        let e = interval::exp_rational(x, bits);
        if ratio > e.hi() {
            return true;
        }
        if ratio < e.lo() {
            return false;
        }
        bits *= 2;
        assert!(bits <= 1 << 16, "failed to separate a rational from e^x");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Constraint;
    use crate::model::UtilityFunction;
    use crate::rational::{int, rat};

    #[test]
    fn rule_values() {
        assert_eq!(score_profile(Rule::Pav, &[int(3)]).unwrap().value, rat(11, 6));
        assert_eq!(score_profile(Rule::Snw, &[int(1), int(2)]).unwrap().value, int(6));
        assert_eq!(score_profile(Rule::Gpav, &[rat(5, 2)]).unwrap().value, rat(5, 3));
        assert!(matches!(
            score_profile(Rule::Pav, &[rat(1, 2)]),
            Err(Error::RuleMismatch(_))
        ));
    }

    #[test]
    fn phi_matches_harmonic_at_integers() {
        for x in 0..6 {
            assert_eq!(phi(&int(x)), rational::harmonic(x as u64));
        }
        assert_eq!(phi(&rat(1, 2)), rat(1, 2));
    }

    fn two_voter_instance() -> Instance {
        Instance::committee(
            3,
            vec![
                UtilityFunction::Additive(vec![int(1), rat(1, 2), int(0)]),
                UtilityFunction::Additive(vec![int(1), int(1), int(1)]),
            ],
            3,
            Constraint::Cardinality,
        )
        .unwrap()
    }

    #[test]
    fn marginals() {
        let inst = two_voter_instance();
        let w = Committee::new([0, 2]);
        let add = marginal_add(Rule::Gpav, &inst, &w, 1).unwrap();
        // voter 0: u 1 -> 3/2, Φ gains (1/2)/2; voter 1: u 2 -> 3, gains 1/3
        assert_eq!(add.per_voter, vec![rat(1, 4), rat(1, 3)]);
        assert_eq!(add.total, rat(7, 12));
        let snw = marginal_add(Rule::Snw, &inst, &Committee::new([0]), 1).unwrap();
        assert_eq!(snw.per_voter[1], rat(3, 2));
        let rem = marginal_remove(Rule::Pav, &inst, &Committee::new([1, 2]), 2);
        assert!(rem.is_err(), "voter 0 has utility 1/2, not an integer");
        assert!(marginal_add(Rule::Gpav, &inst, &w, 0).is_err());
    }

    #[test]
    fn delta_star_values() {
        let inst = two_voter_instance();
        let w = Committee::new([0, 1]);
        // u(W) = (3/2, 2), u(c=2) = (0, 1)
        assert_eq!(delta_star(&inst, &w, 2, &[0, 1]).unwrap(), rat(1, 3));
        assert_eq!(delta_star(&inst, &w, 2, &[0]).unwrap(), int(0));
    }

    #[test]
    fn exp_threshold() {
        assert!(ratio_exceeds_exp(&rat(272, 100), &int(1)));
        assert!(!ratio_exceeds_exp(&rat(271, 100), &int(1)));
        assert!(!ratio_exceeds_exp(&int(1), &int(0)));
    }
}
