//! Directed-rounding interval arithmetic over exact rationals.
//!
//! Endpoints are rationals rounded outward to multiples of `2^-bits`, so
//! enclosures stay small while every computed interval provably contains
//! the true real value. `exp` and `ln` use Taylor / atanh series with explicit
//! remainder bounds.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

pub const DEFAULT_BITS: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn round_down(q: &Rational, bits: u32) -> Rational {
    let scale = two_pow(bits);
    Rational::new(rational::floor(&(q * Rational::from_integer(scale.clone()))), scale)
}

fn round_up(q: &Rational, bits: u32) -> Rational {
    let scale = two_pow(bits);
    Rational::new(rational::ceil(&(q * Rational::from_integer(scale.clone()))), scale)
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    fn rounded(lo: Rational, hi: Rational, bits: u32) -> Self {
        Interval {
            lo: round_down(&lo, bits),
            hi: round_up(&hi, bits),
        }
    }

    pub fn add(&self, o: &Interval, bits: u32) -> Self {
        Self::rounded(&self.lo + &o.lo, &self.hi + &o.hi, bits)
    }

    pub fn sub(&self, o: &Interval, bits: u32) -> Self {
        Self::rounded(&self.lo - &o.hi, &self.hi - &o.lo, bits)
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    /// Exact product (no rounding); callers round when sizes matter.
    pub fn mul(&self, o: &Interval) -> Self {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn mul_round(&self, o: &Interval, bits: u32) -> Self {
        let p = self.mul(o);
        Self::rounded(p.lo, p.hi, bits)
    }

    pub fn recip(&self, bits: u32) -> Self {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "reciprocal of an interval containing zero"
        );
        Self::rounded(self.hi.recip(), self.lo.recip(), bits)
    }

    pub fn div(&self, o: &Interval, bits: u32) -> Self {
        self.mul_round(&o.recip(bits + 16), bits)
    }

    pub fn powi(&self, e: u32, bits: u32) -> Self {
        let mut acc = Interval::point(Rational::one());
        for _ in 0..e {
            acc = acc.mul_round(self, bits);
        }
        acc
    }

    pub fn exp(&self, bits: u32) -> Self {
        let lo = exp_rational(&self.lo, bits).lo;
        let hi = exp_rational(&self.hi, bits).hi;
        Interval { lo, hi }
    }

    pub fn ln(&self, bits: u32) -> Self {
        assert!(self.lo.is_positive(), "logarithm of a non-positive interval");
        let lo = ln_rational(&self.lo, bits).lo;
        let hi = ln_rational(&self.hi, bits).hi;
        Interval { lo, hi }
    }

    /// Enclosure of `√q` for rational `q ≥ 0`.
    pub fn sqrt_rational(q: &Rational, bits: u32) -> Self {
        assert!(!q.is_negative(), "square root of a negative number");
        let scale = two_pow(bits);
        let scaled = q * Rational::from_integer(&scale * &scale);
        let s = rational::floor(&scaled).sqrt();
        let lo = Rational::new(s.clone(), scale.clone());
        let hi = Rational::new(s + 1, scale);
        Interval { lo, hi }
    }

    /// `Some(Less)` when every point is below every point of `o`, `Some(Greater)`
    /// symmetrically, `None` when the intervals overlap.
    pub fn separation(&self, o: &Interval) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn certainly_lt(&self, o: &Interval) -> bool {
        self.hi < o.lo
    }

    pub fn certainly_gt(&self, o: &Interval) -> bool {
        self.lo > o.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        rational::to_f64(&((&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(
            f,
            "[{:.12e}, {:.12e}]",
            rational::to_f64(&self.lo),
            rational::to_f64(&self.hi)
        )
    }
}

/// Enclosure of `e^x` for rational `x`.
pub fn exp_rational(x: &Rational, bits: u32) -> Interval {
    if x.is_zero() {
        return Interval::point(Rational::one());
    }
    let half = rational::rat(1, 2);
    let mut s = 0u32;
    let mut y = x.clone();
    while y.abs() > half {
        y /= Rational::from_integer(BigInt::from(2));
        s += 1;
    }
    let work = bits + 32 + s;
    let eps = Rational::new(BigInt::one(), two_pow(work));
    let mut sum = Rational::one();
    let mut term = Rational::one();
    let mut j = 1u64;
    loop {
        term = term * &y / Rational::from_integer(BigInt::from(j));
        sum += &term;
        j += 1;
        if term.abs() < eps {
            break;
        }
    }
    // Tail after the last included term is bounded by twice the next term
    // since |y| ≤ 1/2.
    let next = term.abs() * y.abs() / Rational::from_integer(BigInt::from(j));
    let rem = next * Rational::from_integer(BigInt::from(2));
    let mut acc = Interval::rounded(&sum - &rem, &sum + &rem, work);
    for _ in 0..s {
        acc = acc.mul_round(&acc, work);
    }
    Interval::rounded(acc.lo, acc.hi, bits)
}

/// `2·atanh(t)` enclosure for |t| ≤ 1/3, i.e. `ln((1+t)/(1-t))`.
fn atanh2(t: &Rational, bits: u32) -> Interval {
    if t.is_zero() {
        return Interval::point(Rational::zero());
    }
    let eps = Rational::new(BigInt::one(), two_pow(bits + 8));
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = Rational::zero();
    let mut k = 1u64;
    loop {
        let term = &power / Rational::from_integer(BigInt::from(k));
        sum += &term;
        power *= &t2;
        k += 2;
        if term.abs() < eps {
            break;
        }
    }
    // Remaining terms: Σ_{j≥0} |t|^{k+2j}/(k+2j) ≤ |t|^k / (k (1 - t²)).
    let rem = power.abs() / (Rational::from_integer(BigInt::from(k)) * (Rational::one() - &t2));
    let two = Rational::from_integer(BigInt::from(2));
    Interval::rounded(&two * (&sum - &rem), &two * (&sum + &rem), bits)
}

pub fn ln2(bits: u32) -> Interval {
    atanh2(&rational::rat(1, 3), bits)
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln_rational(x: &Rational, bits: u32) -> Interval {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    if x.is_one() {
        return Interval::point(Rational::zero());
    }
    let shift = x.numer().bits() as i64 - x.denom().bits() as i64;
    let y = if shift >= 0 {
        x / Rational::from_integer(BigInt::one() << shift as u32)
    } else {
        x * Rational::from_integer(BigInt::one() << (-shift) as u32)
    };
    let work = bits + 16 + 64 - (shift.unsigned_abs().leading_zeros());
    let t = (&y - Rational::one()) / (&y + Rational::one());
    let base = atanh2(&t, work);
    let k = Interval::point(Rational::from_integer(BigInt::from(shift)));
    let total = base.add(&ln2(work).mul(&k), work);
    Interval::rounded(total.lo, total.hi, bits)
}

/// Enclosure of `x^y` for rational `x > 0` and rational `y`.
pub fn pow_rational(x: &Rational, y: &Rational, bits: u32) -> Interval {
    let work = bits + 32;
    let l = ln_rational(x, work).mul(&Interval::point(y.clone()));
    let l = Interval::rounded(l.lo, l.hi, work);
    let r = l.exp(work);
    Interval::rounded(r.lo, r.hi, bits)
}
