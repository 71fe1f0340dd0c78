//! Seeded random instances for property tests and experiment runs.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::committee::{self, Committee};
use crate::constraints::{Constraint, Row};
use crate::error::{Error, Result};
use crate::model::{default_labels, AxiomPolicy, Coverage, Instance, Mode, UtilityFunction};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityKind {
    Approval,
    Additive,
    Xos,
    Coverage,
}

impl UtilityKind {
    pub const ALL: [UtilityKind; 4] = [
        UtilityKind::Approval,
        UtilityKind::Additive,
        UtilityKind::Xos,
        UtilityKind::Coverage,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    None,
    PartitionMatroid,
    Packing,
    Explicit,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 4] = [
        ConstraintKind::None,
        ConstraintKind::PartitionMatroid,
        ConstraintKind::Packing,
        ConstraintKind::Explicit,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub utility: UtilityKind,
    pub constraint: ConstraintKind,
}

/// Weights are multiples of `1/4` in `[0, 1]`.
fn quarter<R: Rng>(rng: &mut R) -> Rational {
    rational::rat(rng.gen_range(0..=4), 4)
}

pub fn random_utility<R: Rng>(kind: UtilityKind, m: usize, rng: &mut R) -> UtilityFunction {
    match kind {
        UtilityKind::Approval => {
            UtilityFunction::Approval((0..m).filter(|_| rng.gen_bool(0.5)).collect())
        }
        UtilityKind::Additive => UtilityFunction::Additive((0..m).map(|_| quarter(rng)).collect()),
        UtilityKind::Xos => {
            let clauses = rng.gen_range(1..=3);
            UtilityFunction::Xos(
                (0..clauses)
                    .map(|_| (0..m).map(|_| quarter(rng)).collect())
                    .collect(),
            )
        }
        UtilityKind::Coverage => {
            let elements = m + 2;
            let weights: Vec<Rational> = (0..elements)
                .map(|_| rational::rat(rng.gen_range(1..=2), 4))
                .collect();
            let covers = (0..m)
                .map(|_| {
                    let count = rng.gen_range(0..=2);
                    let mut e: Vec<usize> = (0..count).map(|_| rng.gen_range(0..elements)).collect();
                    e.sort_unstable();
                    e.dedup();
                    e
                })
                .collect();
            UtilityFunction::Coverage(Coverage { covers, weights })
        }
    }
}

/// A random partition of all candidates into two or three groups with caps
/// between 1 and the group size.
pub fn random_partition<R: Rng>(m: usize, rng: &mut R) -> Constraint {
    let mut ids: Vec<usize> = (0..m).collect();
    ids.shuffle(rng);
    let parts = rng.gen_range(2..=3).min(m.max(1));
    let mut groups = vec![Vec::new(); parts];
    for (i, c) in ids.into_iter().enumerate() {
        groups[i % parts].push(c);
    }
    let groups: Vec<Committee> = groups.into_iter().map(Committee::new).collect();
    let caps = groups.iter().map(|g| rng.gen_range(1..=g.len().max(1))).collect();
    Constraint::Partition { groups, caps }
}

pub fn random_constraint<R: Rng>(kind: ConstraintKind, m: usize, k: usize, rng: &mut R) -> Constraint {
    match kind {
        ConstraintKind::None => Constraint::Cardinality,
        ConstraintKind::PartitionMatroid => random_partition(m, rng),
        ConstraintKind::Packing => {
            let size = rng.gen_range(2.min(m)..=m);
            let mut ids: Vec<usize> = (0..m).collect();
            ids.shuffle(rng);
            let set = Committee::new(ids.into_iter().take(size));
            let bound = rng.gen_range(1..=set.len().max(1));
            Constraint::Packing(vec![Row { set, bound }])
        }
        ConstraintKind::Explicit => {
            let pool: Vec<usize> = (0..m).collect();
            let all: Vec<Committee> = committee::subsets_up_to(&pool, k)
                .filter(|c| !c.is_empty())
                .collect();
            let mut family: BTreeSet<Committee> =
                all.iter().filter(|_| rng.gen_bool(0.35)).cloned().collect();
            if family.is_empty() {
                family.insert(all[rng.gen_range(0..all.len())].clone());
            }
            Constraint::Explicit(family)
        }
    }
}

pub fn random_instance<R: Rng>(spec: &RandomSpec, rng: &mut R) -> Result<Instance> {
    if spec.n == 0 || spec.m == 0 || spec.k == 0 || spec.k > spec.m {
        return Err(Error::Parameter(format!(
            "random instance needs n, m >= 1 and 1 <= k <= m, got {spec:?}"
        )));
    }
    let utilities = (0..spec.n)
        .map(|_| random_utility(spec.utility, spec.m, rng))
        .collect();
    let constraint = random_constraint(spec.constraint, spec.m, spec.k, rng);
    Instance::committee(spec.m, utilities, spec.k, constraint)
}

/// Budgeting instance with sizes in `1..=3` and a budget between the
/// largest size and the total size.
pub fn random_budget_instance<R: Rng>(n: usize, m: usize, kind: UtilityKind, rng: &mut R) -> Result<Instance> {
    let sizes: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=3)).collect();
    let total: u64 = sizes.iter().sum();
    let largest = *sizes.iter().max().unwrap_or(&1);
    let budget = rng.gen_range(largest..=total.max(largest));
    let utilities = (0..n).map(|_| random_utility(kind, m, rng)).collect();
    Instance::new(
        default_labels(m),
        utilities,
        Mode::Budget { sizes, budget },
        Constraint::Cardinality,
        AxiomPolicy::Check,
    )
}

/// A uniformly random committee of `P` (by rejection over members).
pub fn random_member<R: Rng>(inst: &Instance, rng: &mut R) -> Result<Committee> {
    let members = inst.family().members(crate::constraints::DEFAULT_SUBSET_CAP)?;
    let feasible: Vec<&Committee> = members.iter().filter(|c| inst.is_feasible(c)).collect();
    if feasible.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(feasible[rng.gen_range(0..feasible.len())].clone())
}
