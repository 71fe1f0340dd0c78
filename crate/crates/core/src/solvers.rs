//! The Global (exhaustive maximization over P) and Local (swap search) rules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::committee::{self, Committee};
use crate::constraints::{self, Constraint, DEFAULT_SUBSET_CAP};
use crate::error::{self, Error, Result};
use crate::model::Instance;
use crate::rational::{self, Rational};
use crate::scoring::{self, Rule, Score};

/// Global enumerates all subsets of size ≤ k only when `m` is at most this.
pub const GLOBAL_CANDIDATE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub committee: Committee,
    pub score: Score,
    pub iterations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Start {
    /// Greedy basis in candidate-id order.
    Greedy,
    Given(Committee),
    /// Greedy basis over a seeded random order.
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConfig {
    /// Swaps must raise the score by more than `ε/(nk)` (pav, gpav) or by a
    /// factor above `e^{ε/(nk)}` (snw).
    pub epsilon: Rational,
    pub start: Start,
    pub max_iterations: Option<u64>,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            epsilon: rational::int(0),
            start: Start::Greedy,
            max_iterations: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Global,
    Local,
}

/// Key ordering candidates for Global: higher score, then larger committee,
/// then lexicographically smaller id sequence.
fn better(a: &(Score, Committee), b: &(Score, Committee)) -> bool {
    a.0.value
        .cmp(&b.0.value)
        .then(a.1.len().cmp(&b.1.len()))
        .then(b.1.cmp(&a.1))
        == std::cmp::Ordering::Greater
}

fn pick(a: (Score, Committee), b: (Score, Committee)) -> (Score, Committee) {
    if better(&b, &a) {
        b
    } else {
        a
    }
}

/// Exact maximizer of the rule over the feasible family.
pub fn solve_global(inst: &Instance, rule: Rule) -> Result<Solution> {
    let fam = inst.family();
    if !matches!(fam.constraint(), Constraint::Explicit(_)) && inst.m() > GLOBAL_CANDIDATE_LIMIT {
        return Err(error::limit(
            "Global enumeration over candidates",
            inst.m() as u128,
            GLOBAL_CANDIDATE_LIMIT as u128,
        ));
    }
    let members: Vec<Committee> = fam
        .members(DEFAULT_SUBSET_CAP)?
        .into_iter()
        .filter(|t| inst.is_feasible(t))
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let scored: Vec<(Score, Committee)> = members
        .into_par_iter()
        .map(|t| scoring::score(rule, inst, &t).map(|s| (s, t)))
        .collect::<Result<_>>()?;
    let count = scored.len() as u64;
    let best = scored.into_iter().reduce(pick).expect("nonempty");
    Ok(Solution {
        committee: best.1,
        score: best.0,
        iterations: count,
    })
}

fn improves(rule: Rule, old: &Score, new: &Score, threshold: &Rational) -> bool {
    match rule {
        Rule::Snw => {
            if old.value <= Rational::from_integer(0.into()) {
                return new.value > old.value;
            }
            scoring::ratio_exceeds_exp(&(&new.value / &old.value), threshold)
        }
        _ => &new.value - &old.value > *threshold,
    }
}

/// The first improving swap in scan order (outgoing id ascending, incoming id
/// ascending), if any.
pub fn first_improving_swap(
    inst: &Instance,
    rule: Rule,
    w: &Committee,
    epsilon: &Rational,
) -> Result<Option<(usize, usize, Score)>> {
    let k = inst.require_k()?;
    let threshold = epsilon / rational::from_usize(inst.n() * k.max(1));
    let current = scoring::score(rule, inst, w)?;
    for out in w.iter() {
        for inc in 0..inst.m() {
            if w.contains(inc) {
                continue;
            }
            let next = w.swap(out, inc);
            if !inst.is_feasible(&next) {
                continue;
            }
            let s = scoring::score(rule, inst, &next)?;
            if improves(rule, &current, &s, &threshold) {
                return Ok(Some((out, inc, s)));
            }
        }
    }
    Ok(None)
}

pub fn start_committee(inst: &Instance, start: &Start) -> Result<Committee> {
    let fam = inst.family();
    let w = match start {
        Start::Greedy => constraints::greedy_basis(fam)?,
        Start::Given(w) => w.clone(),
        Start::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            constraints::random_basis(fam, &mut rng)?
        }
    };
    inst.check_committee(&w)?;
    if !constraints::is_basis(fam, &w) {
        return Err(Error::NotABasis(format!("start committee {w}")));
    }
    Ok(w)
}

/// First-improvement swap search from a basis, restricted to matroid
/// families.
pub fn solve_local(inst: &Instance, rule: Rule, config: &LocalConfig) -> Result<Solution> {
    inst.require_k()?;
    if !inst.family().is_matroid() {
        return Err(Error::UnsupportedConstraint(format!(
            "Local needs a matroid family, got {}",
            inst.family().constraint().kind_name()
        )));
    }
    if config.epsilon < rational::int(0) {
        return Err(Error::Parameter("epsilon must be nonnegative".into()));
    }
    let mut w = start_committee(inst, &config.start)?;
    let mut iterations = 0u64;
    while let Some((out, inc, _)) = first_improving_swap(inst, rule, &w, &config.epsilon)? {
        w = w.swap(out, inc);
        iterations += 1;
        if config.max_iterations.is_some_and(|cap| iterations >= cap) {
            break;
        }
    }
    let score = scoring::score(rule, inst, &w)?;
    Ok(Solution {
        committee: w,
        score,
        iterations,
    })
}

/// Checks that no committee in `P` scores strictly higher than `w`.
pub fn is_global_optimum(inst: &Instance, rule: Rule, w: &Committee) -> Result<bool> {
    let target = scoring::score(rule, inst, w)?;
    for t in inst.family().members(DEFAULT_SUBSET_CAP)? {
        if inst.is_feasible(&t) && scoring::score(rule, inst, &t)?.value > target.value {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Count of all committees Global would score, for planning.
pub fn global_search_size(inst: &Instance) -> u128 {
    committee::count_up_to(inst.m(), inst.family().max_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UtilityFunction;
    use crate::rational::{int, rat};

    #[test]
    fn single_additive_voter_takes_top_weights() {
        let inst = Instance::committee(
            4,
            vec![UtilityFunction::Additive(vec![
                rat(1, 2),
                int(1),
                rat(1, 2),
                rat(1, 4),
            ])],
            2,
            Constraint::Cardinality,
        )
        .unwrap();
        let sol = solve_global(&inst, Rule::Snw).unwrap();
        assert_eq!(sol.committee, Committee::new([0, 1]));
    }

    #[test]
    fn empty_family_is_an_error() {
        let inst = Instance::committee(
            2,
            vec![UtilityFunction::Approval(Committee::new([0]))],
            1,
            Constraint::Explicit(Default::default()),
        )
        .unwrap();
        assert!(matches!(solve_global(&inst, Rule::Snw), Err(Error::EmptyFamily)));
    }

    #[test]
    fn local_reaches_a_swap_optimum() {
        let inst = Instance::committee(
            4,
            vec![
                UtilityFunction::Approval(Committee::new([2, 3])),
                UtilityFunction::Approval(Committee::new([3])),
            ],
            2,
            Constraint::Cardinality,
        )
        .unwrap();
        let sol = solve_local(&inst, Rule::Pav, &LocalConfig::default()).unwrap();
        assert_eq!(sol.committee, Committee::new([2, 3]));
        assert!(first_improving_swap(&inst, Rule::Pav, &sol.committee, &int(0))
            .unwrap()
            .is_none());
    }

    #[test]
    fn local_rejects_non_matroid_families() {
        let inst = Instance::committee(
            3,
            vec![UtilityFunction::Approval(Committee::new([0]))],
            2,
            Constraint::Packing(vec![crate::constraints::Row {
                set: Committee::new([0, 1]),
                bound: 1,
            }]),
        )
        .unwrap();
        assert!(matches!(
            solve_local(&inst, Rule::Snw, &LocalConfig::default()),
            Err(Error::UnsupportedConstraint(_))
        ));
    }
}
