//! Feasibility families and completability queries.

mod matroid;

pub use matroid::{
    basis_exchange_bijection, extend_to_basis, greedy_basis, is_basis, random_basis,
    verify_matroid_axioms, MatroidCheck, DEFAULT_MATROID_CHECK_LIMIT,
};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::committee::{self, Committee};
use crate::error::{self, Error, Result};

/// Independence predicate for a user-supplied matroid. Must be pure.
pub type IndependenceOracle = Arc<dyn Fn(&Committee) -> bool + Send + Sync>;

/// Default cap on the number of subsets any search over a family may visit.
pub const DEFAULT_SUBSET_CAP: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub set: Committee,
    pub bound: usize,
}

#[derive(Clone)]
pub enum Constraint {
    Cardinality,
    Explicit(BTreeSet<Committee>),
    /// Disjoint groups with per-group caps; candidates outside every group
    /// are unrestricted.
    Partition {
        groups: Vec<Committee>,
        caps: Vec<usize>,
    },
    Matroid {
        name: String,
        oracle: IndependenceOracle,
    },
    /// `|T ∩ set| ≤ bound` for every row.
    Packing(Vec<Row>),
    /// `|T ∩ set| ≥ bound` for every row.
    Covering(Vec<Row>),
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Constraint::Cardinality => f.write_str("Cardinality"),
            Constraint::Explicit(s) => f.debug_tuple("Explicit").field(s).finish(),
            Constraint::Partition { groups, caps } => f
                .debug_struct("Partition")
                .field("groups", groups)
                .field("caps", caps)
                .finish(),
            Constraint::Matroid { name, .. } => {
                f.debug_struct("Matroid").field("name", name).finish()
            }
            Constraint::Packing(r) => f.debug_tuple("Packing").field(r).finish(),
            Constraint::Covering(r) => f.debug_tuple("Covering").field(r).finish(),
        }
    }
}

impl Constraint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Constraint::Cardinality => "cardinality",
            Constraint::Explicit(_) => "explicit",
            Constraint::Partition { .. } => "partition",
            Constraint::Matroid { .. } => "matroid",
            Constraint::Packing(_) => "packing",
            Constraint::Covering(_) => "covering",
        }
    }

    fn admits(&self, t: &Committee) -> bool {
        let hits = |set: &Committee| t.iter().filter(|&c| set.contains(c)).count();
        match self {
            Constraint::Cardinality => true,
            Constraint::Explicit(sets) => sets.contains(t),
            Constraint::Partition { groups, caps } => {
                groups.iter().zip(caps).all(|(g, &cap)| hits(g) <= cap)
            }
            Constraint::Matroid { oracle, .. } => oracle(t),
            Constraint::Packing(rows) => rows.iter().all(|r| hits(&r.set) <= r.bound),
            Constraint::Covering(rows) => rows.iter().all(|r| hits(&r.set) >= r.bound),
        }
    }
}

/// The set `P` of feasible committees: a constraint together with the
/// cardinality bound (`k` in committee mode, `m` in budget mode).
#[derive(Clone, Debug)]
pub struct FeasibilityFamily {
    constraint: Constraint,
    m: usize,
    max_size: usize,
}

/// Result of a completability query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub completable: bool,
    /// The lexicographically least `W''` (by size, then ids) when completable.
    pub witness: Option<Committee>,
}

impl FeasibilityFamily {
    /// Validates the constraint. A matroid oracle is verified exhaustively
    /// here, which requires `m ≤ DEFAULT_MATROID_CHECK_LIMIT`.
    pub fn new(constraint: Constraint, m: usize, max_size: usize) -> Result<Self> {
        let fam = Self::new_trusted(constraint, m, max_size)?;
        if let Constraint::Matroid { name, .. } = &fam.constraint {
            if m > DEFAULT_MATROID_CHECK_LIMIT {
                return Err(Error::UnsupportedConstraint(format!(
                    "matroid oracle {name:?} over {m} candidates cannot be verified \
                     exhaustively (limit {DEFAULT_MATROID_CHECK_LIMIT}); use new_trusted"
                )));
            }
            let check = verify_matroid_axioms(&fam)?;
            if let Some(v) = check.violation {
                return Err(Error::MatroidAxiom(format!("oracle {name:?}: {v}")));
            }
        }
        Ok(fam)
    }

    /// Structural validation only; matroid oracles are taken on trust.
    pub fn new_trusted(constraint: Constraint, m: usize, max_size: usize) -> Result<Self> {
        let check_ids = |set: &Committee, what: &str| -> Result<()> {
            match set.max_id() {
                Some(c) if c >= m => Err(Error::MalformedInstance(format!(
                    "{what} names candidate {c} but m = {m}"
                ))),
                _ => Ok(()),
            }
        };
        match &constraint {
            Constraint::Cardinality | Constraint::Matroid { .. } => {}
            Constraint::Explicit(sets) => {
                for s in sets {
                    check_ids(s, "explicit family member")?;
                }
            }
            Constraint::Partition { groups, caps } => {
                if groups.len() != caps.len() {
                    return Err(Error::MalformedInstance(format!(
                        "partition has {} groups but {} caps",
                        groups.len(),
                        caps.len()
                    )));
                }
                let mut seen = BTreeSet::new();
                for g in groups {
                    check_ids(g, "partition group")?;
                    for c in g.iter() {
                        if !seen.insert(c) {
                            return Err(Error::MalformedInstance(format!(
                                "partition groups overlap at candidate {c}"
                            )));
                        }
                    }
                }
            }
            Constraint::Packing(rows) | Constraint::Covering(rows) => {
                for r in rows {
                    check_ids(&r.set, "constraint row")?;
                }
            }
        }
        Ok(FeasibilityFamily {
            constraint,
            m,
            max_size,
        })
    }

    pub fn cardinality(m: usize, k: usize) -> Self {
        FeasibilityFamily {
            constraint: Constraint::Cardinality,
            m,
            max_size: k,
        }
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn candidates(&self) -> Vec<usize> {
        (0..self.m).collect()
    }

    /// Membership in `P`, including the cardinality bound.
    pub fn is_feasible(&self, t: &Committee) -> bool {
        t.len() <= self.max_size
            && t.max_id().is_none_or(|c| c < self.m)
            && self.constraint.admits(t)
    }

    /// Families closed under taking subsets.
    pub fn is_downward_closed(&self) -> bool {
        matches!(
            self.constraint,
            Constraint::Cardinality
                | Constraint::Partition { .. }
                | Constraint::Matroid { .. }
                | Constraint::Packing(_)
        )
    }

    /// Families that are (truncated) matroids, where Local search applies.
    pub fn is_matroid(&self) -> bool {
        matches!(
            self.constraint,
            Constraint::Cardinality | Constraint::Partition { .. } | Constraint::Matroid { .. }
        )
    }

    /// Whether some `W''` with `|W''| ≤ q` makes `Ŵ ∪ W''` feasible.
    pub fn is_q_completable(&self, hat_w: &Committee, q: usize) -> Result<Completion> {
        self.is_q_completable_capped(hat_w, q, DEFAULT_SUBSET_CAP)
    }

    pub fn is_q_completable_capped(
        &self,
        hat_w: &Committee,
        q: usize,
        cap: u128,
    ) -> Result<Completion> {
        let yes = |w: Committee| Completion {
            completable: true,
            witness: Some(w),
        };
        let no = Completion {
            completable: false,
            witness: None,
        };
        if self.is_downward_closed() {
            // Any feasible superset of Ŵ certifies Ŵ itself is feasible.
            return Ok(if self.is_feasible(hat_w) {
                yes(Committee::empty())
            } else {
                no
            });
        }
        if let Constraint::Explicit(sets) = &self.constraint {
            let best = sets
                .iter()
                .filter(|s| s.len() <= self.max_size && hat_w.is_subset(s))
                .map(|s| s.difference(hat_w))
                .filter(|d| d.len() <= q)
                .min_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            return Ok(best.map(yes).unwrap_or(no));
        }
        let pool: Vec<usize> = (0..self.m).filter(|&c| !hat_w.contains(c)).collect();
        let q = q.min(self.max_size.saturating_sub(hat_w.len()));
        let needed = committee::count_up_to(pool.len(), q);
        if needed > cap {
            return Err(error::limit("completion search", needed, cap));
        }
        for extra in committee::subsets_up_to(&pool, q) {
            if self.is_feasible(&hat_w.union(&extra)) {
                return Ok(yes(extra));
            }
        }
        Ok(no)
    }

    /// Every member of `P`, by size then lexicographically.
    pub fn members(&self, cap: u128) -> Result<Vec<Committee>> {
        if let Constraint::Explicit(sets) = &self.constraint {
            let mut v: Vec<Committee> = sets
                .iter()
                .filter(|s| self.is_feasible(s))
                .cloned()
                .collect();
            v.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            return Ok(v);
        }
        let needed = committee::count_up_to(self.m, self.max_size);
        if needed > cap {
            return Err(error::limit("feasible family enumeration", needed, cap));
        }
        let pool = self.candidates();
        Ok(committee::subsets_up_to(&pool, self.max_size)
            .filter(|t| self.constraint.admits(t))
            .collect())
    }
}
