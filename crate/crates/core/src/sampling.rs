//! Exact and Monte-Carlo checks of independent-sampling bounds.
//!
//! Every Monte-Carlo run is split into fixed-size chunks; chunk `c` draws
//! from ChaCha8 seeded with the run seed on stream `c`, so results do not
//! depend on the number of worker threads.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::committee::Committee;
use crate::error::{self, Error, Result};
use crate::interval::{exp_rational, Interval, DEFAULT_BITS};
use crate::model::{is_self_bounding, Instance, UtilityFunction};
use crate::rational::{self, Rational};
use crate::surd::Surd;

pub const EXACT_SIZE_LIMIT: usize = 16;
/// Runs with fewer trials get an inconclusive tail verdict.
pub const MIN_CONCLUSIVE_TRIALS: u64 = 10_000;
const CHUNK: u64 = 4096;

fn check_alpha(alpha: &Rational) -> Result<()> {
    if !rational::in_unit_interval(alpha) {
        return Err(Error::Parameter(format!(
            "sampling probability {} outside [0, 1]",
            rational::format(alpha)
        )));
    }
    Ok(())
}

/// `u(O)` for every `O ⊆ T`, indexed by bitmask over `T`'s members.
fn subset_values(u: &UtilityFunction, t: &Committee) -> Result<Vec<Surd>> {
    if t.len() > EXACT_SIZE_LIMIT {
        return Err(error::limit("sampled set", t.len() as u128, EXACT_SIZE_LIMIT as u128));
    }
    let members = t.as_slice();
    (0..1u64 << t.len())
        .into_par_iter()
        .map(|mask| u.value(&Committee::from_mask(mask, members)))
        .collect()
}

/// `E[u(O)]` where `O` keeps each member of `T` independently with
/// probability `α`: `Σ_{O⊆T} α^{|O|}(1−α)^{|T|−|O|} u(O)`.
pub fn exact_sample_expectation(u: &UtilityFunction, t: &Committee, alpha: &Rational) -> Result<Surd> {
    check_alpha(alpha)?;
    let values = subset_values(u, t)?;
    Ok(expectation_from_table(&values, t.len(), alpha))
}

fn expectation_from_table(values: &[Surd], len: usize, alpha: &Rational) -> Surd {
    let keep: Vec<Rational> = (0..=len as u32).map(|e| rational::pow(alpha, e)).collect();
    let drop_p = Rational::one() - alpha;
    let drop: Vec<Rational> = (0..=len as u32).map(|e| rational::pow(&drop_p, e)).collect();
    values.iter().enumerate().fold(Surd::zero(), |acc, (mask, v)| {
        let size = (mask as u64).count_ones() as usize;
        acc.add(&v.scale(&(&keep[size] * &drop[len - size])))
    })
}

/// Checks `E[u(O)] ≥ α^β u(T)` exactly, after confirming that `u` is
/// `β`-self-bounding on the subsets of `T`.
pub fn verify_sampling_bound(u: &UtilityFunction, t: &Committee, alpha: &Rational, beta: u32) -> Result<bool> {
    check_alpha(alpha)?;
    if beta == 0 {
        return Err(Error::Parameter("beta must be at least 1".into()));
    }
    let check = is_self_bounding(u, t.as_slice(), &rational::int(beta as i64))?;
    if !check.holds {
        return Err(Error::Premise(format!(
            "utility is not {beta}-self-bounding on {t}; first violation at {}",
            check.witness.map(|w| w.to_string()).unwrap_or_default()
        )));
    }
    let values = subset_values(u, t)?;
    let expectation = expectation_from_table(&values, t.len(), alpha);
    let full = values.last().expect("at least the empty set");
    Ok(expectation >= full.scale(&rational::pow(alpha, beta)))
}

/// `α = num/den` with machine-sized parts, for Bernoulli draws.
fn bernoulli_parts(alpha: &Rational) -> Result<(u64, u64)> {
    let num = alpha.numer().to_u64();
    let den = alpha.denom().to_u64();
    match (num, den) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::Parameter(format!(
            "sampling probability {} needs a numerator and denominator below 2^64",
            rational::format(alpha)
        ))),
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn sample(members: &[usize], num: u64, den: u64, rng: &mut ChaCha8Rng) -> (u64, Committee) {
    let mut mask = 0u64;
    let mut chosen = Vec::new();
    for (i, &c) in members.iter().enumerate() {
        if rng.gen_range(0..den) < num {
            if i < 64 {
                mask |= 1 << i;
            }
            chosen.push(c);
        }
    }
    (mask, Committee::new(chosen))
}

fn chunks(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(CHUNK))
        .map(|c| (c, CHUNK.min(trials - c * CHUNK)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailVerdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Empirical lower-tail frequency against `e^{−δ²μ₀/(2β)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    /// `μ₀ = E[u(O)]` in decimal; exact when `mu0_exact`.
    pub mu0: f64,
    pub mu0_exact: bool,
    /// Standard error of the `μ₀` estimate when it was sampled.
    pub mu0_std_error: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Trials with `u(O) ≤ (1−δ)μ₀`.
    pub hits: u64,
    pub frequency: f64,
    #[serde(with = "rational::serde_q")]
    pub bound_lo: Rational,
    #[serde(with = "rational::serde_q")]
    pub bound_hi: Rational,
    /// `3·sqrt(bound(1 − bound)/trials)`, rounded up.
    pub slack: f64,
    pub verdict: TailVerdict,
}

/// Samples `O ⊆ T` with inclusion probability `α` and measures how often
/// `u(O) ≤ (1−δ)μ₀`. The verdict passes when the frequency is at most the
/// bound plus three binomial standard deviations.
pub fn mc_lower_tail(
    u: &UtilityFunction,
    t: &Committee,
    alpha: &Rational,
    delta: &Rational,
    beta: u32,
    trials: u64,
    seed: u64,
) -> Result<TailReport> {
    check_alpha(alpha)?;
    if !rational::in_unit_interval(delta) {
        return Err(Error::Parameter("delta must lie in [0, 1]".into()));
    }
    if trials == 0 || beta == 0 {
        return Err(Error::Parameter("trials and beta must be positive".into()));
    }
    let (num, den) = bernoulli_parts(alpha)?;
    let members = t.as_slice();
    let table = if t.len() <= EXACT_SIZE_LIMIT {
        Some(subset_values(u, t)?)
    } else {
        None
    };
    let evaluate = |mask: u64, o: &Committee| -> Result<Surd> {
        match &table {
            Some(v) => Ok(v[mask as usize].clone()),
            None => u.value(o),
        }
    };

    let (mu0, mu0_exact, mu0_std_error) = match &table {
        Some(v) => (expectation_from_table(v, t.len(), alpha), true, None),
        None => {
            // independent stream family for the mean estimate
            let sums: Vec<(f64, f64)> = chunks(trials)
                .into_par_iter()
                .map(|(c, len)| {
                    let mut rng = chunk_rng(seed ^ 0x9e37_79b9_7f4a_7c15, c);
                    let mut s = (0.0, 0.0);
                    for _ in 0..len {
                        let (mask, o) = sample(members, num, den, &mut rng);
                        let x = evaluate(mask, &o)?.to_f64();
                        s.0 += x;
                        s.1 += x * x;
                    }
                    Ok(s)
                })
                .collect::<Result<_>>()?;
            let (s1, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            let mean = s1 / trials as f64;
            let var = (s2 / trials as f64 - mean * mean).max(0.0);
            let mean_q = Rational::from_float(mean).unwrap_or_else(Rational::zero);
            (Surd::rational(mean_q), false, Some((var / trials as f64).sqrt()))
        }
    };
    let threshold = mu0.scale(&(Rational::one() - delta));
    let hits: u64 = chunks(trials)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut h = 0u64;
            for _ in 0..len {
                let (mask, o) = sample(members, num, den, &mut rng);
                if evaluate(mask, &o)? <= threshold {
                    h += 1;
                }
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();

    let mu0_iv = mu0.to_interval(DEFAULT_BITS);
    let factor = delta * delta / rational::int(2 * beta as i64);
    let bound = Interval::new(
        exp_rational(&(-(mu0_iv.hi() * &factor)), DEFAULT_BITS).lo().clone(),
        exp_rational(&(-(mu0_iv.lo() * &factor)), DEFAULT_BITS).hi().clone(),
    );
    let one = Rational::one();
    let spread = bound.hi() * (&one - bound.lo()) / Rational::from_integer(BigInt::from(trials));
    let sigma = Interval::sqrt_rational(&spread.abs(), 64);
    let slack_q = rational::int(3) * sigma.hi();
    let frequency = Rational::new(BigInt::from(hits), BigInt::from(trials));
    let within = frequency <= bound.hi() + &slack_q;
    let verdict = if trials < MIN_CONCLUSIVE_TRIALS {
        TailVerdict::Inconclusive
    } else if within {
        TailVerdict::Pass
    } else {
        TailVerdict::Fail
    };
    Ok(TailReport {
        mu0: mu0.to_f64(),
        mu0_exact,
        mu0_std_error,
        trials,
        seed,
        hits,
        frequency: hits as f64 / trials as f64,
        bound_lo: bound.lo().clone(),
        bound_hi: bound.hi().clone(),
        slack: rational::to_f64(&slack_q),
        verdict,
    })
}

/// Inputs of the sampling step in the endowment-to-core reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endow2Params {
    /// Candidates are kept with probability `1/γ`.
    #[serde(with = "rational::serde_q")]
    pub gamma: Rational,
    #[serde(with = "rational::serde_q")]
    pub kappa: Rational,
    #[serde(with = "rational::serde_q")]
    pub eta: Rational,
    /// Target fraction of the coalition that must strictly gain.
    #[serde(with = "rational::serde_q")]
    pub q: Rational,
    pub beta: u32,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endow2Report {
    pub premises_satisfied: bool,
    pub premise_failures: Vec<String>,
    /// `φ = |S|/n`.
    #[serde(with = "rational::serde_q")]
    pub phi: Rational,
    /// `T′ = {j ∈ T : s_j ≤ (φ/γ)b}`.
    pub t_prime: Committee,
    /// `b″ = (φ/γ)κb`.
    #[serde(with = "rational::serde_q")]
    pub cost_cap: Rational,
    pub trials: u64,
    pub seed: u64,
    /// Trials with `|S′| ≥ q|S|`, `S′ = {i ∈ S : u_i(O) > u_i(W)}`.
    pub coalition_hits: u64,
    /// Trials with `Cost(O) ≤ b″`.
    pub cost_hits: u64,
    pub joint_hits: u64,
    pub joint_occurred: bool,
    /// The sample of the first trial where both events held.
    pub joint_example: Option<Committee>,
}

/// Runs the sampling step of the reduction on a concrete budgeting
/// instance: restricts `T` to cheap projects, keeps each with probability
/// `1/γ`, and counts how often enough of `S` strictly gains while the
/// sample stays within `b″`. Unmet premises are reported, not raised.
pub fn endow2_reduction_experiment(
    inst: &Instance,
    w: &Committee,
    coalition: &[usize],
    t: &Committee,
    params: &Endow2Params,
) -> Result<Endow2Report> {
    let (sizes, budget) = inst.require_budget()?;
    inst.check_committee(w)?;
    inst.check_committee(t)?;
    if coalition.is_empty() || coalition.iter().any(|&i| i >= inst.n()) {
        return Err(Error::Parameter("coalition must be a non-empty set of voters".into()));
    }
    let one = Rational::one();
    if params.gamma < one {
        return Err(Error::Parameter("gamma must be at least 1".into()));
    }
    if params.trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    let keep = params.gamma.recip();
    let (num, den) = bernoulli_parts(&keep)?;
    let b = Rational::from_integer(BigInt::from(budget));
    let phi = Rational::new(BigInt::from(coalition.len()), BigInt::from(inst.n()));
    let small = &phi / &params.gamma * &b;
    let cost_cap = &small * &params.kappa;
    let t_prime: Committee = t
        .iter()
        .filter(|&j| Rational::from_integer(BigInt::from(sizes[j])) <= small)
        .collect();

    let mut failures = Vec::new();
    if Rational::from_integer(inst.cost(t)) > &phi * &b {
        failures.push("Cost(T) exceeds phi*b".to_string());
    }
    let lift = &params.eta
        * rational::int(params.beta as i64)
        * rational::pow(&params.gamma, params.beta);
    let before: Vec<Surd> = coalition
        .iter()
        .map(|&i| inst.utility(i).value(w))
        .collect::<Result<_>>()?;
    for (&i, uw) in coalition.iter().zip(&before) {
        let ut = inst.utility(i).value(t)?;
        if ut < uw.add_rational(&one).scale(&lift) {
            failures.push(format!("voter {i}: u(T) below eta*beta*gamma^beta*(u(W)+1)"));
        }
    }

    let members = t_prime.as_slice().to_vec();
    let need = &params.q * rational::from_usize(coalition.len());
    let per_chunk: Vec<(u64, u64, u64, Option<(u64, Committee)>)> = chunks(params.trials)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(params.seed, c);
            let mut acc = (0u64, 0u64, 0u64, None);
            for trial in 0..len {
                let (_, o) = sample(&members, num, den, &mut rng);
                let mut gained = 0usize;
                for (&i, uw) in coalition.iter().zip(&before) {
                    if inst.utility(i).value(&o)? > *uw {
                        gained += 1;
                    }
                }
                let enough = rational::from_usize(gained) >= need;
                let cheap = Rational::from_integer(inst.cost(&o)) <= cost_cap;
                acc.0 += enough as u64;
                acc.1 += cheap as u64;
                if enough && cheap {
                    acc.2 += 1;
                    if acc.3.is_none() {
                        acc.3 = Some((c * CHUNK + trial, o));
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut report = Endow2Report {
        premises_satisfied: failures.is_empty(),
        premise_failures: failures,
        phi,
        t_prime,
        cost_cap,
        trials: params.trials,
        seed: params.seed,
        coalition_hits: 0,
        cost_hits: 0,
        joint_hits: 0,
        joint_occurred: false,
        joint_example: None,
    };
    let mut first: Option<(u64, Committee)> = None;
    for (a, b2, j, ex) in per_chunk {
        report.coalition_hits += a;
        report.cost_hits += b2;
        report.joint_hits += j;
        if let Some(e) = ex {
            if first.as_ref().is_none_or(|f| e.0 < f.0) {
                first = Some(e);
            }
        }
    }
    report.joint_occurred = report.joint_hits > 0;
    report.joint_example = first.map(|(_, o)| o);
    Ok(report)
}
