use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::committee::Committee;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::surd::Surd;

/// A voter's utility oracle over candidate subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UtilityFunction {
    /// `|T ∩ A|`.
    Approval(Committee),
    /// `Σ_{j∈T} w_j` with one weight per candidate, each in `[0, 1]`.
    Additive(Vec<Rational>),
    /// Weighted coverage: candidate `j` covers `covers[j]`, and the value is the
    /// total weight of covered elements.
    Coverage(Coverage),
    /// Maximum over clauses of the clause's additive value.
    Xos(Vec<Vec<Rational>>),
    /// Explicit values; the empty set is implicitly 0.
    Table(BTreeMap<Committee, Rational>),
    /// The two-party parametric family with exponent `β`.
    Lb00(Lb00),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub covers: Vec<Vec<usize>>,
    pub weights: Vec<Rational>,
}

/// `u(W) = (r/β)·(x_p^β + z·(1 − x_p^β)·x_s^β)` where `x_p`, `x_s` are the
/// fractions of the primary and secondary parties chosen and
/// `z = (3/4)^{β/2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lb00 {
    beta: u32,
    r: u32,
    primary: usize,
    secondary: usize,
    parties: Vec<Option<usize>>,
    table: Vec<Surd>,
}

/// `(3/4)^{β/2}`, exact; irrational for odd `β`.
pub fn lb00_z(beta: u32) -> Surd {
    let three_quarters = rational::rat(3, 4);
    if beta % 2 == 0 {
        Surd::rational(rational::pow(&three_quarters, beta / 2))
    } else {
        // (3/4)^{(β-1)/2} · √3 / 2
        let coef = rational::pow(&three_quarters, (beta - 1) / 2) * rational::rat(1, 2);
        Surd::new(Rational::zero(), coef, rational::int(3))
    }
}

impl Lb00 {
    pub fn new(
        beta: u32,
        r: u32,
        primary: usize,
        secondary: usize,
        parties: Vec<Option<usize>>,
    ) -> Result<Self> {
        if beta == 0 || r == 0 {
            return Err(Error::MalformedUtility(
                "lb00 needs beta >= 1 and r >= 1".into(),
            ));
        }
        if primary == secondary {
            return Err(Error::MalformedUtility(
                "lb00 primary and secondary parties must differ".into(),
            ));
        }
        for p in [primary, secondary] {
            let size = parties.iter().filter(|&&q| q == Some(p)).count();
            if size > r as usize {
                return Err(Error::MalformedUtility(format!(
                    "lb00 party {p} has {size} candidates, more than r = {r}"
                )));
            }
        }
        let z = lb00_z(beta);
        let rr = rational::int(r as i64);
        let scale = &rr / rational::int(beta as i64);
        let mut table = Vec::with_capacity((r as usize + 1).pow(2));
        for ca in 0..=r {
            let xa = rational::pow(&(rational::int(ca as i64) / &rr), beta);
            for cb in 0..=r {
                let xb = rational::pow(&(rational::int(cb as i64) / &rr), beta);
                let second = z.scale(&((Rational::one() - &xa) * xb));
                table.push(second.add_rational(&xa).scale(&scale));
            }
        }
        Ok(Lb00 {
            beta,
            r,
            primary,
            secondary,
            parties,
            table,
        })
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn primary(&self) -> usize {
        self.primary
    }

    pub fn secondary(&self) -> usize {
        self.secondary
    }

    pub fn parties(&self) -> &[Option<usize>] {
        &self.parties
    }

    /// Value as a function of the party counts.
    pub fn value_at(&self, primary_count: u32, secondary_count: u32) -> &Surd {
        let r = self.r as usize + 1;
        &self.table[primary_count as usize * r + secondary_count as usize]
    }

    pub fn counts(&self, t: &Committee) -> Result<(u32, u32)> {
        let (mut a, mut b) = (0u32, 0u32);
        for c in t.iter() {
            match self.parties.get(c) {
                None => {
                    return Err(Error::MalformedUtility(format!(
                        "candidate {c} outside the lb00 party map"
                    )))
                }
                Some(Some(p)) if *p == self.primary => a += 1,
                Some(Some(p)) if *p == self.secondary => b += 1,
                _ => {}
            }
        }
        Ok((a, b))
    }
}

fn weight_at(weights: &[Rational], c: usize, kind: &str) -> Result<Rational> {
    weights
        .get(c)
        .cloned()
        .ok_or_else(|| Error::MalformedUtility(format!("{kind}: no weight for candidate {c}")))
}

impl UtilityFunction {
    pub fn kind_name(&self) -> &'static str {
        match self {
            UtilityFunction::Approval(_) => "approval",
            UtilityFunction::Additive(_) => "additive",
            UtilityFunction::Coverage(_) => "coverage",
            UtilityFunction::Xos(_) => "xos",
            UtilityFunction::Table(_) => "table",
            UtilityFunction::Lb00(_) => "lb00",
        }
    }

    pub fn lb00(
        beta: u32,
        r: u32,
        primary: usize,
        secondary: usize,
        parties: Vec<Option<usize>>,
    ) -> Result<Self> {
        Ok(UtilityFunction::Lb00(Lb00::new(
            beta, r, primary, secondary, parties,
        )?))
    }

    /// Structural validation against `m` candidates.
    pub fn validate(&self, m: usize) -> Result<()> {
        let unit = |w: &Rational, what: &str| {
            if rational::in_unit_interval(w) {
                Ok(())
            } else {
                Err(Error::MalformedUtility(format!(
                    "{what} weight {} outside [0, 1]",
                    rational::format(w)
                )))
            }
        };
        match self {
            UtilityFunction::Approval(a) => {
                if let Some(c) = a.max_id().filter(|&c| c >= m) {
                    return Err(Error::MalformedUtility(format!(
                        "approval set names candidate {c} but m = {m}"
                    )));
                }
            }
            UtilityFunction::Additive(w) => {
                if w.len() != m {
                    return Err(Error::MalformedUtility(format!(
                        "additive utility has {} weights for {m} candidates",
                        w.len()
                    )));
                }
                for x in w {
                    unit(x, "additive")?;
                }
            }
            UtilityFunction::Coverage(cov) => {
                if cov.covers.len() != m {
                    return Err(Error::MalformedUtility(format!(
                        "coverage utility lists {} candidates for m = {m}",
                        cov.covers.len()
                    )));
                }
                for w in &cov.weights {
                    if w.is_negative() {
                        return Err(Error::MalformedUtility(
                            "coverage element weight is negative".into(),
                        ));
                    }
                }
                for (j, elems) in cov.covers.iter().enumerate() {
                    let mut total = Rational::zero();
                    for &e in elems {
                        total += cov.weights.get(e).ok_or_else(|| {
                            Error::MalformedUtility(format!(
                                "candidate {j} covers unknown element {e}"
                            ))
                        })?;
                    }
                    if total > Rational::one() {
                        return Err(Error::MalformedUtility(format!(
                            "candidate {j} covers total weight {} > 1",
                            rational::format(&total)
                        )));
                    }
                }
            }
            UtilityFunction::Xos(clauses) => {
                for cl in clauses {
                    if cl.len() != m {
                        return Err(Error::MalformedUtility(format!(
                            "xos clause has {} weights for {m} candidates",
                            cl.len()
                        )));
                    }
                    for x in cl {
                        unit(x, "xos")?;
                    }
                }
            }
            UtilityFunction::Table(entries) => {
                for (set, v) in entries {
                    if let Some(c) = set.max_id().filter(|&c| c >= m) {
                        return Err(Error::MalformedUtility(format!(
                            "table entry names candidate {c} but m = {m}"
                        )));
                    }
                    if v.is_negative() {
                        return Err(Error::MalformedUtility(format!(
                            "table value for {set} is negative"
                        )));
                    }
                    if set.is_empty() && !v.is_zero() {
                        return Err(Error::MalformedUtility(
                            "table assigns a nonzero value to the empty set".into(),
                        ));
                    }
                }
            }
            UtilityFunction::Lb00(l) => {
                if l.parties.len() != m {
                    return Err(Error::MalformedUtility(format!(
                        "lb00 party map has {} entries for {m} candidates",
                        l.parties.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact value, possibly irrational.
    pub fn value(&self, t: &Committee) -> Result<Surd> {
        match self {
            UtilityFunction::Lb00(l) => {
                let (a, b) = l.counts(t)?;
                Ok(l.value_at(a, b).clone())
            }
            _ => self.evaluate(t).map(Surd::rational),
        }
    }

    /// Exact rational value; errors when the value is irrational.
    pub fn evaluate(&self, t: &Committee) -> Result<Rational> {
        match self {
            UtilityFunction::Approval(a) => Ok(Rational::from_integer(BigInt::from(
                t.iter().filter(|&c| a.contains(c)).count(),
            ))),
            UtilityFunction::Additive(w) => {
                let mut acc = Rational::zero();
                for c in t.iter() {
                    acc += weight_at(w, c, "additive")?;
                }
                Ok(acc)
            }
            UtilityFunction::Coverage(cov) => {
                let mut covered = vec![false; cov.weights.len()];
                for c in t.iter() {
                    let elems = cov.covers.get(c).ok_or_else(|| {
                        Error::MalformedUtility(format!("coverage: unknown candidate {c}"))
                    })?;
                    for &e in elems {
                        covered[e] = true;
                    }
                }
                Ok(covered
                    .iter()
                    .zip(&cov.weights)
                    .filter(|(c, _)| **c)
                    .fold(Rational::zero(), |acc, (_, w)| acc + w))
            }
            UtilityFunction::Xos(clauses) => {
                let mut best = Rational::zero();
                for cl in clauses {
                    let mut s = Rational::zero();
                    for c in t.iter() {
                        s += weight_at(cl, c, "xos")?;
                    }
                    if s > best {
                        best = s;
                    }
                }
                Ok(best)
            }
            UtilityFunction::Table(entries) => {
                if t.is_empty() {
                    return Ok(Rational::zero());
                }
                entries.get(t).cloned().ok_or_else(|| {
                    Error::MalformedUtility(format!("table has no entry for {t}"))
                })
            }
            UtilityFunction::Lb00(_) => {
                let v = self.value(t)?;
                v.as_rational()
                    .cloned()
                    .ok_or_else(|| Error::Irrational(format!("lb00 value {v} at {t}")))
            }
        }
    }

    /// Whether every value is rational.
    pub fn is_rational_valued(&self) -> bool {
        match self {
            UtilityFunction::Lb00(l) => l.beta % 2 == 0,
            _ => true,
        }
    }

    /// Per-candidate weights when the function is additive (approval included).
    pub fn additive_weights(&self, m: usize) -> Option<Vec<Rational>> {
        match self {
            UtilityFunction::Approval(a) => Some(
                (0..m)
                    .map(|c| {
                        if a.contains(c) {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect(),
            ),
            UtilityFunction::Additive(w) => Some(w.clone()),
            _ => None,
        }
    }

    pub fn approval_set(&self) -> Option<&Committee> {
        match self {
            UtilityFunction::Approval(a) => Some(a),
            _ => None,
        }
    }

    /// Whether the kind satisfies monotonicity and 1-Lipschitz by construction
    /// once `validate` passes.
    pub fn axioms_hold_structurally(&self) -> bool {
        matches!(
            self,
            UtilityFunction::Approval(_)
                | UtilityFunction::Additive(_)
                | UtilityFunction::Coverage(_)
                | UtilityFunction::Xos(_)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn approval_counts_intersection() {
        let u = UtilityFunction::Approval(Committee::new([1, 3]));
        assert_eq!(u.evaluate(&Committee::new([1, 2])).unwrap(), int(1));
        assert_eq!(u.evaluate(&Committee::empty()).unwrap(), int(0));
    }

    #[test]
    fn xos_takes_best_clause() {
        // Two clauses over three candidates.
        let u = UtilityFunction::Xos(vec![
            vec![int(1), int(1), int(0)],
            vec![int(0), int(0), int(1)],
        ]);
        assert_eq!(u.evaluate(&Committee::new([0, 1, 2])).unwrap(), int(2));
        assert_eq!(u.evaluate(&Committee::new([2])).unwrap(), int(1));
    }

    #[test]
    fn coverage_counts_each_element_once() {
        let u = UtilityFunction::Coverage(Coverage {
            covers: vec![vec![0, 1], vec![1], vec![2]],
            weights: vec![rat(1, 2), rat(1, 4), rat(1, 3)],
        });
        assert_eq!(u.evaluate(&Committee::new([0, 1])).unwrap(), rat(3, 4));
        assert!(u.validate(3).is_ok());
    }

    #[test]
    fn table_missing_entry_is_an_error() {
        let mut t = BTreeMap::new();
        t.insert(Committee::new([0]), int(1));
        let u = UtilityFunction::Table(t);
        assert!(matches!(
            u.evaluate(&Committee::new([1])),
            Err(Error::MalformedUtility(_))
        ));
        assert_eq!(u.evaluate(&Committee::empty()).unwrap(), int(0));
    }

    #[test]
    fn lb00_full_primary_party() {
        // β = 5, r = 2, parties a = {0,1}, b = {2,3}
        let parties = vec![Some(0), Some(0), Some(1), Some(1)];
        let u = UtilityFunction::lb00(5, 2, 0, 1, parties).unwrap();
        assert_eq!(u.value(&Committee::new([0, 1])).unwrap(), Surd::rational(rat(2, 5)));
        let v = u.value(&Committee::new([2, 3])).unwrap();
        assert_eq!(v, lb00_z(5).scale(&rat(2, 5)));
        assert!(u.evaluate(&Committee::new([2])).is_err());
    }

    #[test]
    fn lb00_even_beta_is_rational() {
        assert_eq!(lb00_z(6), Surd::rational(rat(27, 64)));
        let z5 = lb00_z(5);
        assert_eq!(z5.mul(&z5), Surd::rational(rational::pow(&rat(3, 4), 5)));
    }

    #[test]
    fn validation_rejects_out_of_range_weights() {
        let u = UtilityFunction::Additive(vec![int(2)]);
        assert!(u.validate(1).is_err());
        let u = UtilityFunction::Additive(vec![int(1)]);
        assert!(u.validate(2).is_err());
    }
}
