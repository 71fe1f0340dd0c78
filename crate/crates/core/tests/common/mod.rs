//! Naive reference implementations of the stability notions, written
//! directly from the quantifier structure of each definition: every
//! coalition, every deviation, every kept set, no pruning or memoisation.

#![allow(dead_code)]

use num_bigint::BigInt;
use restrained_core::model::Instance;
use restrained_core::surd::Surd;
use restrained_core::{Committee, Rational};

pub fn all_subsets(ids: &[usize]) -> Vec<Committee> {
    (0..1u64 << ids.len())
        .map(|mask| {
            Committee::new(
                ids.iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &c)| c),
            )
        })
        .collect()
}

pub fn nonempty_coalitions(n: usize) -> Vec<Vec<usize>> {
    all_subsets(&(0..n).collect::<Vec<_>>())
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.as_slice().to_vec())
        .collect()
}

fn utility(inst: &Instance, i: usize, t: &Committee) -> Surd {
    inst.utility(i).value(t).unwrap()
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// `u_i(T) ≥ γ(u_i(W) + 1)` for every `i ∈ S`.
fn all_gain(inst: &Instance, s: &[usize], t: &Committee, w: &Committee, gamma: &Rational) -> bool {
    s.iter().all(|&i| {
        let need = utility(inst, i, w).add_rational(&one()).scale(gamma);
        utility(inst, i, t) >= need
    })
}

fn large_enough(s: usize, n: usize, min_fraction: Option<&Rational>) -> bool {
    min_fraction.is_none_or(|a| Rational::from_integer(s.into()) >= a * Rational::from_integer(n.into()))
}

/// Membership in the feasible family: size at most `k` and feasible.
fn in_p(inst: &Instance, t: &Committee) -> bool {
    t.len() <= inst.k().unwrap() && inst.is_feasible(t)
}

/// Whether some `(S, T)` with `|T| ≤ |S|k/n` blocks `W` at factor `γ`.
pub fn core_blocked(
    inst: &Instance,
    w: &Committee,
    gamma: &Rational,
    min_fraction: Option<&Rational>,
    in_family: bool,
) -> bool {
    let (n, k) = (inst.n(), inst.k().unwrap());
    let everything = all_subsets(&(0..inst.m()).collect::<Vec<_>>());
    nonempty_coalitions(n).iter().any(|s| {
        large_enough(s.len(), n, min_fraction)
            && everything.iter().any(|t| {
                t.len() * n <= s.len() * k
                    && (!in_family || in_p(inst, t))
                    && all_gain(inst, s, t, w, gamma)
            })
    })
}

/// The kept sets `Ŵ` considered for a coalition with endowment `kp`.
fn kept_sets(inst: &Instance, w: &Committee, kp: usize, any_hat: bool) -> Vec<Committee> {
    let k = inst.k().unwrap();
    let base: Vec<usize> = if any_hat {
        (0..inst.m()).collect()
    } else {
        w.as_slice().to_vec()
    };
    all_subsets(&base)
        .into_iter()
        .filter(|h| h.len() <= k - kp)
        .collect()
}

/// Every `T = Ŵ ∪ W′` with `|W′| ≤ kp` and `T ∈ P`.
fn completions(inst: &Instance, hat: &Committee, kp: usize) -> Vec<Committee> {
    all_subsets(&(0..inst.m()).collect::<Vec<_>>())
        .into_iter()
        .filter(|extra| extra.len() <= kp)
        .map(|extra| hat.union(&extra))
        .filter(|t| in_p(inst, t))
        .collect()
}

/// Restrained blocking: for every `kp`-completable `Ŵ` (of which at least
/// one must exist) some completion satisfies `good`.
fn restrained_blocked<F>(inst: &Instance, w: &Committee, any_hat: bool, min_fraction: Option<&Rational>, good: F) -> bool
where
    F: Fn(&[usize], &Committee) -> bool,
{
    let (n, k) = (inst.n(), inst.k().unwrap());
    nonempty_coalitions(n).iter().any(|s| {
        if !large_enough(s.len(), n, min_fraction) {
            return false;
        }
        let kp = s.len() * k / n;
        let mut seen_completable = false;
        for hat in kept_sets(inst, w, kp, any_hat) {
            let options = completions(inst, &hat, kp);
            if options.is_empty() {
                continue;
            }
            seen_completable = true;
            if !options.iter().any(|t| good(s, t)) {
                return false;
            }
        }
        seen_completable
    })
}

pub fn restrained_core_blocked(
    inst: &Instance,
    w: &Committee,
    gamma: &Rational,
    any_hat: bool,
    min_fraction: Option<&Rational>,
) -> bool {
    restrained_blocked(inst, w, any_hat, min_fraction, |s, t| all_gain(inst, s, t, w, gamma))
}

/// Restrained EJR phrased through a cohesion level `ℓ`: `S` blocks iff for
/// some `ℓ` every member has `u_i(W) < ℓ` and every kept set can be
/// completed with at least `ℓ` commonly approved candidates.
pub fn restrained_ejr_blocked(inst: &Instance, w: &Committee, any_hat: bool) -> bool {
    let approvals: Vec<Committee> = (0..inst.n())
        .map(|i| inst.utility(i).approval_set().unwrap().clone())
        .collect();
    let k = inst.k().unwrap();
    (1..=k).any(|level| {
        restrained_blocked(inst, w, any_hat, None, |s, t| {
            let below = s.iter().all(|&i| approvals[i].intersection(w).len() < level);
            let common = s
                .iter()
                .fold(t.clone(), |acc, &i| acc.intersection(&approvals[i]));
            below && common.len() >= level
        })
    })
}

fn cost(inst: &Instance, t: &Committee) -> BigInt {
    inst.cost(t)
}

/// Budgeting core: some `(S, T)` with `Cost(T)·n ≤ |S|·b` and every member
/// gaining a factor `γ` over `u_i(W) + 1`.
pub fn pb_core_blocked(inst: &Instance, w: &Committee, gamma: &Rational) -> bool {
    let (_, b) = inst.require_budget().unwrap();
    let n = inst.n();
    let everything = all_subsets(&(0..inst.m()).collect::<Vec<_>>());
    nonempty_coalitions(n).iter().any(|s| {
        everything.iter().any(|t| {
            cost(inst, t) * BigInt::from(n) <= BigInt::from(s.len()) * BigInt::from(b)
                && all_gain(inst, s, t, w, gamma)
        })
    })
}

/// Endowment core: some `(S, T)` with `Cost(T) ≤ |S|b/(θn)` and
/// `u_i(T) ≥ u_i(W)` for every member.
pub fn endowment_core_blocked(inst: &Instance, w: &Committee, theta: &Rational) -> bool {
    let (_, b) = inst.require_budget().unwrap();
    let n = inst.n();
    let everything = all_subsets(&(0..inst.m()).collect::<Vec<_>>());
    nonempty_coalitions(n).iter().any(|s| {
        everything.iter().any(|t| {
            let allowed = Rational::new(BigInt::from(s.len()) * BigInt::from(b), BigInt::from(n)) / theta;
            Rational::from_integer(cost(inst, t)) <= allowed
                && s.iter().all(|&i| utility(inst, i, t) >= utility(inst, i, w))
        })
    })
}
