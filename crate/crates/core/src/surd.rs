//! Exact numbers of the form `a + b·√d` with rational `a`, `b`, `d`.
//!
//! Used for utilities whose values involve a square root of a rational (the
//! odd-exponent parametric family). Every operation combining two surds
//! requires a shared radicand; comparisons reduce to sign tests on squares.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::interval::Interval;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Rational,
    b: Rational,
    d: Rational,
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let root = |n: &BigInt| {
        let s = n.sqrt();
        (&s * &s == *n).then_some(s)
    };
    Some(Rational::new(root(q.numer())?, root(q.denom())?))
}

impl Surd {
    /// Builds `a + b·√d`, folding the radical away when `d` is a perfect square.
    pub fn new(a: Rational, b: Rational, d: Rational) -> Self {
        assert!(!d.is_negative(), "negative radicand");
        if b.is_zero() {
            return Surd::rational(a);
        }
        if let Some(s) = exact_sqrt(&d) {
            return Surd::rational(a + b * s);
        }
        Surd { a, b, d }
    }

    pub fn rational(a: Rational) -> Self {
        Surd {
            a,
            b: Rational::zero(),
            d: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Surd::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Surd::rational(Rational::one())
    }

    /// `√d` itself.
    pub fn sqrt(d: Rational) -> Self {
        Surd::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_coefficient(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &Rational {
        &self.d
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn radicand_with(&self, other: &Surd) -> Rational {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => other.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, other.d, "surds with different radicands");
                self.d.clone()
            }
        }
    }

    pub fn add(&self, other: &Surd) -> Surd {
        let d = self.radicand_with(other);
        Surd::new(&self.a + &other.a, &self.b + &other.b, d)
    }

    pub fn sub(&self, other: &Surd) -> Surd {
        let d = self.radicand_with(other);
        Surd::new(&self.a - &other.a, &self.b - &other.b, d)
    }

    pub fn neg(&self) -> Surd {
        Surd::new(-&self.a, -&self.b, self.d.clone())
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        let d = self.radicand_with(other);
        let a = &self.a * &other.a + &self.b * &other.b * &d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Surd::new(a, b, d)
    }

    pub fn scale(&self, q: &Rational) -> Surd {
        Surd::new(&self.a * q, &self.b * q, self.d.clone())
    }

    pub fn add_rational(&self, q: &Rational) -> Surd {
        Surd::new(&self.a + q, self.b.clone(), self.d.clone())
    }

    /// Multiplicative inverse via the conjugate. Panics on zero.
    pub fn recip(&self) -> Surd {
        assert!(!self.is_zero(), "division by zero");
        let norm = &self.a * &self.a - &self.b * &self.b * &self.d;
        Surd::new(&self.a / &norm, -&self.b / &norm, self.d.clone())
    }

    pub fn div(&self, other: &Surd) -> Surd {
        self.mul(&other.recip())
    }

    pub fn pow(&self, e: u32) -> Surd {
        let mut acc = Surd::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // Opposite signs: compare a² with b²·d.
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.d;
        match sa {
            Ordering::Greater => lhs.cmp(&rhs),
            _ => rhs.cmp(&lhs),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Outward enclosure at the given precision in bits.
    pub fn to_interval(&self, bits: u32) -> Interval {
        let a = Interval::point(self.a.clone());
        if self.b.is_zero() {
            return a;
        }
        let root = Interval::sqrt_rational(&self.d, bits);
        a.add(&root.mul(&Interval::point(self.b.clone())), bits)
    }

    /// Display-only decimal approximation.
    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.a) + rational::to_f64(&self.b) * rational::to_f64(&self.d).sqrt()
    }
}

impl From<Rational> for Surd {
    fn from(q: Rational) -> Self {
        Surd::rational(q)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&rational::format(&self.a));
        }
        write!(
            f,
            "{} + {}*sqrt({})",
            rational::format(&self.a),
            rational::format(&self.b),
            rational::format(&self.d)
        )
    }
}


/// Exact ordered field operations shared by `Rational` and `Surd`, so that
/// exhaustive checks run on plain rationals whenever possible.
pub trait Exact: Clone + Ord + Send + Sync + fmt::Display {
    fn zero_value() -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
    fn times_rational(&self, q: &Rational) -> Self;
    fn from_rational(q: Rational) -> Self;
    fn into_surd(self) -> Surd;
}

impl Exact for Rational {
    fn zero_value() -> Self {
        Rational::zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn times_rational(&self, q: &Rational) -> Self {
        self * q
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn into_surd(self) -> Surd {
        Surd::rational(self)
    }
}

impl Exact for Surd {
    fn zero_value() -> Self {
        Surd::zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn over(&self, o: &Self) -> Self {
        self.div(o)
    }
    fn times_rational(&self, q: &Rational) -> Self {
        self.scale(q)
    }
    fn from_rational(q: Rational) -> Self {
        Surd::rational(q)
    }
    fn into_surd(self) -> Surd {
        self
    }
}
