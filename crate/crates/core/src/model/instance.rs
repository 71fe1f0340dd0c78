use std::collections::HashSet;

use num_bigint::BigInt;

use crate::committee::Committee;
use crate::constraints::{Constraint, FeasibilityFamily};
use crate::error::{Error, Result};
use crate::model::axioms;
use crate::model::utility::UtilityFunction;
use crate::rational::Rational;
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Multiwinner election with committee size at most `k`.
    Committee { k: usize },
    /// Participatory budgeting with per-candidate sizes and a total budget.
    Budget { sizes: Vec<u64>, budget: u64 },
}

/// Whether utilities are checked against the axioms on construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AxiomPolicy {
    #[default]
    Check,
    Trust,
}

/// An election: voters (one utility each), candidates, and the feasible family.
#[derive(Clone, Debug)]
pub struct Instance {
    candidates: Vec<String>,
    utilities: Vec<UtilityFunction>,
    mode: Mode,
    family: FeasibilityFamily,
}

/// Labels `c0, c1, …`.
pub fn default_labels(m: usize) -> Vec<String> {
    (0..m).map(|j| format!("c{j}")).collect()
}

impl Instance {
    pub fn new(
        candidates: Vec<String>,
        utilities: Vec<UtilityFunction>,
        mode: Mode,
        constraint: Constraint,
        policy: AxiomPolicy,
    ) -> Result<Self> {
        let m = candidates.len();
        if m == 0 {
            return Err(Error::MalformedInstance("no candidates".into()));
        }
        if utilities.is_empty() {
            return Err(Error::MalformedInstance("no voters".into()));
        }
        let mut seen = HashSet::new();
        for label in &candidates {
            if !seen.insert(label.as_str()) {
                return Err(Error::MalformedInstance(format!(
                    "duplicate candidate label {label:?}"
                )));
            }
        }
        let max_size = match &mode {
            Mode::Committee { k } => *k,
            Mode::Budget { sizes, .. } => {
                if sizes.len() != m {
                    return Err(Error::MalformedInstance(format!(
                        "{} sizes for {m} candidates",
                        sizes.len()
                    )));
                }
                if sizes.contains(&0) {
                    return Err(Error::MalformedInstance(
                        "candidate sizes must be positive".into(),
                    ));
                }
                m
            }
        };
        for (i, u) in utilities.iter().enumerate() {
            u.validate(m)
                .map_err(|e| Error::MalformedUtility(format!("voter {i}: {e}")))?;
            if policy == AxiomPolicy::Check {
                axioms::check_for_instance(u, m)
                    .map_err(|e| Error::MalformedUtility(format!("voter {i}: {e}")))?;
            }
        }
        let family = FeasibilityFamily::new(constraint, m, max_size)?;
        Ok(Instance {
            candidates,
            utilities,
            mode,
            family,
        })
    }

    /// Committee-mode instance with default labels and the checking policy.
    pub fn committee(
        m: usize,
        utilities: Vec<UtilityFunction>,
        k: usize,
        constraint: Constraint,
    ) -> Result<Self> {
        Instance::new(
            default_labels(m),
            utilities,
            Mode::Committee { k },
            constraint,
            AxiomPolicy::Check,
        )
    }

    pub fn n(&self) -> usize {
        self.utilities.len()
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn utilities(&self) -> &[UtilityFunction] {
        &self.utilities
    }

    pub fn utility(&self, i: usize) -> &UtilityFunction {
        &self.utilities[i]
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn family(&self) -> &FeasibilityFamily {
        &self.family
    }

    pub fn k(&self) -> Option<usize> {
        match self.mode {
            Mode::Committee { k } => Some(k),
            Mode::Budget { .. } => None,
        }
    }

    pub fn require_k(&self) -> Result<usize> {
        self.k()
            .ok_or_else(|| Error::Mode("this operation needs a committee-size (k) instance".into()))
    }

    pub fn require_budget(&self) -> Result<(&[u64], u64)> {
        match &self.mode {
            Mode::Budget { sizes, budget } => Ok((sizes, *budget)),
            Mode::Committee { .. } => Err(Error::Mode(
                "this operation needs a budget instance (sizes and budget)".into(),
            )),
        }
    }

    pub fn all_candidates(&self) -> Committee {
        (0..self.m()).collect()
    }

    /// `Σ s_j` in budget mode, `|T|` in committee mode.
    pub fn cost(&self, t: &Committee) -> BigInt {
        match &self.mode {
            Mode::Budget { sizes, .. } => t.iter().map(|c| BigInt::from(sizes[c])).sum(),
            Mode::Committee { .. } => BigInt::from(t.len()),
        }
    }

    /// Membership in `P`, plus the budget in budget mode.
    pub fn is_feasible(&self, t: &Committee) -> bool {
        if !self.family.is_feasible(t) {
            return false;
        }
        match &self.mode {
            Mode::Budget { budget, .. } => self.cost(t) <= BigInt::from(*budget),
            Mode::Committee { .. } => true,
        }
    }

    pub fn check_committee(&self, t: &Committee) -> Result<()> {
        match t.max_id() {
            Some(c) if c >= self.m() => Err(Error::Membership(format!(
                "candidate {c} does not exist (m = {})",
                self.m()
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_rational_valued(&self) -> bool {
        self.utilities.iter().all(|u| u.is_rational_valued())
    }

    /// `u_i(T)` for every voter.
    pub fn profile(&self, t: &Committee) -> Result<Vec<Rational>> {
        self.utilities.iter().map(|u| u.evaluate(t)).collect()
    }

    /// Exact possibly-irrational values for every voter.
    pub fn value_profile(&self, t: &Committee) -> Result<Vec<Surd>> {
        self.utilities.iter().map(|u| u.value(t)).collect()
    }

    /// The same election viewed as budgeting with unit sizes and budget `k`.
    pub fn lift_to_budget(&self) -> Result<Instance> {
        let k = self.require_k()?;
        Ok(Instance {
            candidates: self.candidates.clone(),
            utilities: self.utilities.clone(),
            mode: Mode::Budget {
                sizes: vec![1; self.m()],
                budget: k as u64,
            },
            family: FeasibilityFamily::new_trusted(
                self.family.constraint().clone(),
                self.m(),
                self.m(),
            )?,
        })
    }

    /// Replaces the feasible family, keeping everything else.
    pub fn with_constraint(&self, constraint: Constraint) -> Result<Instance> {
        let family = FeasibilityFamily::new(constraint, self.m(), self.family.max_size())?;
        Ok(Instance {
            family,
            ..self.clone()
        })
    }
}
