use num_bigint::BigInt;

use super::{HatMode, Notion, VerificationReport, VerifyOptions, Witness};
use crate::committee::{self, Committee};
use crate::error::Result;
use crate::model::Instance;
use crate::rational::{self, Rational};
use crate::surd::Surd;

fn value(inst: &Instance, i: usize, t: &Committee) -> Result<Surd> {
    inst.utility(i).value(t)
}

fn improves(inst: &Instance, i: usize, t: &Committee, w: &Committee, gamma: &Rational) -> Result<bool> {
    Ok(value(inst, i, t)? >= value(inst, i, w)?.add_rational(&rational::int(1)).scale(gamma))
}

fn valid_coalition(inst: &Instance, s: &[usize], opts: &VerifyOptions) -> bool {
    !s.is_empty()
        && s.iter().all(|&i| i < inst.n())
        && s.windows(2).all(|p| p[0] < p[1])
        && opts.coalition_large_enough(s.len(), inst.n())
}

fn every<F: Fn(usize) -> Result<bool>>(s: &[usize], f: F) -> Result<bool> {
    for &i in s {
        if !f(i)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Re-checks a failing report's witness against the definitions, using
/// none of the enumeration machinery of the checkers.
///
/// Returns `true` iff the witness really shows that `w` is not stable.
pub fn replay_witness(
    inst: &Instance,
    w: &Committee,
    report: &VerificationReport,
    opts: &VerifyOptions,
) -> Result<bool> {
    let p = &report.parameter;
    match (&report.witness, report.notion) {
        (None, _) => Ok(false),
        (Some(Witness::Deviation { coalition, committee: t }), notion) => {
            if !valid_coalition(inst, coalition, opts) || t.max_id().is_some_and(|c| c >= inst.m()) {
                return Ok(false);
            }
            let n = inst.n();
            let s = coalition.len();
            match notion {
                Notion::Core => {
                    let k = inst.require_k()?;
                    if t.is_empty() || t.len() * n > s * k {
                        return Ok(false);
                    }
                    if opts.deviations_in_family && !inst.family().is_feasible(t) {
                        return Ok(false);
                    }
                    every(coalition, |i| improves(inst, i, t, w, p))
                }
                Notion::PbCore | Notion::EndowmentCore => {
                    let view = match inst.require_budget() {
                        Ok(_) => inst.clone(),
                        Err(_) => inst.lift_to_budget()?,
                    };
                    let (_, b) = view.require_budget()?;
                    let cost = Rational::from_integer(view.cost(t));
                    let lhs = cost * rational::from_usize(n);
                    let rhs = rational::from_usize(s) * Rational::from_integer(BigInt::from(b));
                    if notion == Notion::PbCore {
                        if t.is_empty() || lhs > rhs {
                            return Ok(false);
                        }
                        every(coalition, |i| improves(&view, i, t, w, p))
                    } else {
                        if lhs * p > rhs {
                            return Ok(false);
                        }
                        every(coalition, |i| Ok(value(&view, i, t)? >= value(&view, i, w)?))
                    }
                }
                _ => Ok(false),
            }
        }
        (
            Some(Witness::Restrained {
                coalition,
                k_prime,
                certificate,
            }),
            notion,
        ) => {
            if !valid_coalition(inst, coalition, opts) {
                return Ok(false);
            }
            let k = inst.require_k()?;
            let kp = coalition.len() * k / inst.n();
            if kp != *k_prime {
                return Ok(false);
            }
            let pool: Vec<usize> = match opts.hat_mode {
                HatMode::SubsetOfW => w.iter().collect(),
                HatMode::AnyHatW => (0..inst.m()).collect(),
            };
            let family = inst.family();
            let mut kept_sets = Vec::new();
            for hat in committee::subsets_up_to(&pool, k - kp) {
                if family.is_q_completable(&hat, kp)?.completable {
                    kept_sets.push(hat);
                }
            }
            if kept_sets.is_empty() || kept_sets.len() != certificate.len() {
                return Ok(false);
            }
            let answers: std::collections::BTreeMap<&Committee, &Committee> =
                certificate.iter().map(|e| (&e.kept, &e.added)).collect();
            let common = match notion {
                Notion::RestrainedEjr => {
                    let mut acc: Option<Committee> = None;
                    for &i in coalition {
                        let a = match inst.utility(i).approval_set() {
                            Some(a) => a.clone(),
                            None => return Ok(false),
                        };
                        acc = Some(match acc {
                            None => a,
                            Some(x) => x.intersection(&a),
                        });
                    }
                    acc
                }
                Notion::RestrainedCore => None,
                _ => return Ok(false),
            };
            let need = match &common {
                Some(_) => {
                    let mut best = 0usize;
                    for &i in coalition {
                        best = best.max(inst.utility(i).approval_set().map_or(0, |a| a.intersection(w).len()));
                    }
                    best + 1
                }
                None => 0,
            };
            for hat in &kept_sets {
                let Some(added) = answers.get(hat) else {
                    return Ok(false);
                };
                if added.len() > kp {
                    return Ok(false);
                }
                let t = hat.union(added);
                if !inst.is_feasible(&t) {
                    return Ok(false);
                }
                let ok = match &common {
                    Some(a) => a.intersection(&t).len() >= need,
                    None => every(coalition, |i| improves(inst, i, &t, w, p))?,
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
