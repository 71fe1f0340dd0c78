use num_bigint::BigInt;
use rayon::prelude::*;

use super::{
    check_gamma, check_voter_count, enumeration_guard, satisfied, voters_of, Notion, Stats,
    Values, Verdict, VerificationReport, VerifyOptions, Witness,
};
use crate::committee::{self, Committee};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::{self, Rational};

fn popcount(mask: u64) -> usize {
    mask.count_ones() as usize
}

/// Scans `groups` in order and returns the first committee accepted by
/// `blocks`, with the number of committees up to and including it.
fn first_blocking<F>(groups: Vec<Vec<Committee>>, blocks: F) -> Result<(Option<(Committee, u64)>, u64)>
where
    F: Fn(&Committee) -> Result<Option<u64>> + Sync,
{
    let mut seen = 0u64;
    for group in groups {
        let hit = group
            .par_iter()
            .enumerate()
            .map(|(idx, t)| blocks(t).map(|r| r.map(|s| (idx, s))))
            .find_first(|r| !matches!(r, Ok(None)));
        match hit {
            Some(Ok(Some((idx, s)))) => {
                seen += idx as u64 + 1;
                return Ok((Some((group[idx].clone(), s)), seen));
            }
            Some(Err(e)) => return Err(e),
            _ => seen += group.len() as u64,
        }
    }
    Ok((None, seen))
}

fn report(
    notion: Notion,
    parameter: &Rational,
    found: Option<(Committee, u64)>,
    seen: u64,
) -> VerificationReport {
    let (verdict, witness) = match found {
        Some((committee, s)) => (
            Verdict::Fail,
            Some(Witness::Deviation {
                coalition: voters_of(s),
                committee,
            }),
        ),
        None => (Verdict::Pass, None),
    };
    VerificationReport {
        notion,
        parameter: parameter.clone(),
        verdict,
        witness,
        stats: Stats {
            sets_enumerated: seen,
            coalitions_examined: seen,
        },
        flags: Vec::new(),
        notes: Vec::new(),
    }
}

/// γ-approximate core with the unfloored endowment: `W` fails iff some
/// `T` with `|T|·n ≤ |S_T|·k` exists, where `S_T` is the set of voters with
/// `u_i(T) ≥ γ(u_i(W) + 1)`.
///
/// For fixed `T` the satisfied set is the best coalition, so only `T`
/// is enumerated (by size, then lexicographically).
pub fn check_core(
    inst: &Instance,
    w: &Committee,
    gamma: &Rational,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let k = inst.require_k()?;
    check_gamma(gamma, "gamma")?;
    check_voter_count(inst, usize::MAX)?;
    inst.check_committee(w)?;
    let m = inst.m();
    enumeration_guard("deviating committees", committee::count_up_to(m, k), opts.subset_cap)?;
    let n = inst.n();
    let thresholds = Values::of(inst, w)?.lifted(gamma);
    let pool: Vec<usize> = (0..m).collect();
    let groups: Vec<Vec<Committee>> = (1..=k)
        .map(|size| committee::combinations(&pool, size).collect())
        .collect();
    let (found, seen) = first_blocking(groups, |t| {
        if opts.deviations_in_family && !inst.family().is_feasible(t) {
            return Ok(None);
        }
        let s = satisfied(inst, t, &thresholds)?;
        let size = popcount(s);
        let ok = size > 0 && t.len() * n <= size * k && opts.coalition_large_enough(size, n);
        Ok(ok.then_some(s))
    })?;
    let mut rep = report(Notion::Core, gamma, found, seen);
    rep.notes.push("endowment |S|k/n used without rounding".into());
    if let Some(a) = &opts.min_coalition_fraction {
        rep.notes.push(format!(
            "only coalitions with |S| >= {}·n may block",
            rational::format(a)
        ));
    }
    if opts.deviations_in_family {
        rep.notes.push("deviations restricted to the feasible family".into());
    }
    Ok(rep)
}

fn budget_view(inst: &Instance, opts: &VerifyOptions) -> Result<(Instance, bool)> {
    match inst.require_budget() {
        Ok(_) => Ok((inst.clone(), false)),
        Err(e) if opts.auto_lift => inst.lift_to_budget().map(|l| (l, true)).map_err(|_| e),
        Err(e) => Err(e),
    }
}

fn budget_search<F>(
    inst: &Instance,
    opts: &VerifyOptions,
    include_empty: bool,
    cost_ok: F,
    thresholds: &Values,
) -> Result<(Option<(Committee, u64)>, u64)>
where
    F: Fn(&BigInt, usize) -> bool + Sync,
{
    let m = inst.m();
    let n = inst.n();
    enumeration_guard("deviating projects", committee::count_up_to(m, m), opts.subset_cap)?;
    let pool: Vec<usize> = (0..m).collect();
    let start = if include_empty { 0 } else { 1 };
    let groups: Vec<Vec<Committee>> = (start..=m)
        .map(|size| committee::combinations(&pool, size).collect())
        .collect();
    first_blocking(groups, |t| {
        if opts.deviations_in_family && !inst.family().is_feasible(t) {
            return Ok(None);
        }
        let cost = inst.cost(t);
        if !cost_ok(&cost, n) {
            return Ok(None);
        }
        let s = satisfied(inst, t, thresholds)?;
        let size = popcount(s);
        let ok = size > 0 && cost_ok(&cost, size) && opts.coalition_large_enough(size, n);
        Ok(ok.then_some(s))
    })
}

/// Budgeting core: fails iff some `T` and `S` satisfy `Cost(T)·n ≤ |S|·b`
/// and `u_i(T) ≥ γ(u_i(W) + 1)` for all `i ∈ S`.
pub fn check_pb_core(
    inst: &Instance,
    w: &Committee,
    gamma: &Rational,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_gamma(gamma, "gamma")?;
    let (view, lifted) = budget_view(inst, opts)?;
    check_voter_count(&view, usize::MAX)?;
    view.check_committee(w)?;
    let (_, b) = view.require_budget()?;
    let (b, n) = (BigInt::from(b), BigInt::from(view.n()));
    let thresholds = Values::of(&view, w)?.lifted(gamma);
    let (found, seen) = budget_search(
        &view,
        opts,
        false,
        |cost, s| cost * &n <= BigInt::from(s) * &b,
        &thresholds,
    )?;
    let mut rep = report(Notion::PbCore, gamma, found, seen);
    if lifted {
        rep.flags.push("auto_lifted_unit_sizes".into());
    }
    Ok(rep)
}

/// Endowment core: fails iff some `T` and `S` satisfy
/// `Cost(T)·θ·n ≤ |S|·b` and `u_i(T) ≥ u_i(W)` for all `i ∈ S`.
///
/// `T = ∅` is a legal deviation; a witness using it is flagged
/// `degenerate_empty_deviation`.
pub fn check_endowment_core(
    inst: &Instance,
    w: &Committee,
    theta: &Rational,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_gamma(theta, "theta")?;
    let (view, lifted) = budget_view(inst, opts)?;
    check_voter_count(&view, usize::MAX)?;
    view.check_committee(w)?;
    let (_, b) = view.require_budget()?;
    let b = Rational::from_integer(BigInt::from(b));
    let n = rational::from_usize(view.n());
    let thresholds = Values::of(&view, w)?;
    let (found, seen) = budget_search(
        &view,
        opts,
        true,
        |cost, s| Rational::from_integer(cost.clone()) * theta * &n <= rational::from_usize(s) * &b,
        &thresholds,
    )?;
    let empty = matches!(&found, Some((t, _)) if t.is_empty());
    let mut rep = report(Notion::EndowmentCore, theta, found, seen);
    if lifted {
        rep.flags.push("auto_lifted_unit_sizes".into());
    }
    if empty {
        rep.flags.push("degenerate_empty_deviation".into());
    }
    Ok(rep)
}

/// Direct check of one claimed core deviation, without any enumeration.
pub fn core_deviation_holds(
    inst: &Instance,
    w: &Committee,
    gamma: &Rational,
    coalition: &[usize],
    t: &Committee,
) -> Result<bool> {
    let k = inst.require_k()?;
    inst.check_committee(w)?;
    inst.check_committee(t)?;
    if coalition.is_empty() || t.len() * inst.n() > coalition.len() * k {
        return Ok(false);
    }
    let one = rational::int(1);
    for &i in coalition {
        if i >= inst.n() {
            return Err(Error::Membership(format!("voter {i} does not exist")));
        }
        let u = inst.utility(i);
        if u.value(t)? < u.value(w)?.add_rational(&one).scale(gamma) {
            return Ok(false);
        }
    }
    Ok(true)
}
