use crate::error::{Error, Result};
use crate::interval::{exp_rational, ln_rational, Interval, DEFAULT_BITS};
use crate::rational::{self, Rational};

/// Enclosures of the constants in the endowment-to-core reduction.
#[derive(Clone, Debug)]
pub struct Endow2Bound {
    /// `q* = 1 − e^{−(η−2)²/(2(η−1))} / (1 − e^{κ−1}/κ^κ)`.
    pub q_star: Interval,
    /// `γ* = 32κ / q*`, when `q*` is certainly positive.
    pub gamma_star: Option<Interval>,
    /// `η·β·γ*^β`, when `q*` is certainly positive.
    pub bound: Option<Interval>,
    /// `q*` is certainly positive, so some `q < q*` with `q > 32κ/γ` exists
    /// for every `γ > γ*`.
    pub feasible: bool,
}

/// Evaluates the approximation factor `η·β·(32κ/q*)^β` in directed
/// interval arithmetic.
pub fn endow2_bound(beta: u32, kappa: &Rational, eta: &Rational) -> Result<Endow2Bound> {
    let bits = DEFAULT_BITS;
    let one = rational::int(1);
    let two = rational::int(2);
    if beta == 0 {
        return Err(Error::Parameter("beta must be at least 1".into()));
    }
    if *kappa <= one {
        return Err(Error::Parameter("kappa must exceed 1".into()));
    }
    if *eta <= two {
        return Err(Error::Parameter("eta must exceed 2".into()));
    }
    // e^{κ−1}/κ^κ = exp(κ − 1 − κ ln κ)
    let kappa_ln_kappa = ln_rational(kappa, bits).mul_round(&Interval::point(kappa.clone()), bits);
    let exponent = Interval::point(kappa - &one).sub(&kappa_ln_kappa, bits);
    let ratio = exponent.exp(bits);
    let denom = Interval::point(one.clone()).sub(&ratio, bits);
    if !denom.certainly_gt(&Interval::point(Rational::from_integer(0.into()))) {
        return Err(Error::Parameter(
            "1 - e^(kappa-1)/kappa^kappa is not positive".into(),
        ));
    }
    let d = eta - &two;
    let tail = exp_rational(&(-(&d * &d) / (&two * (eta - &one))), bits);
    let q_star = Interval::point(one).sub(&tail.div(&denom, bits), bits);
    let zero = Interval::point(Rational::from_integer(0.into()));
    let feasible = q_star.certainly_gt(&zero);
    if !feasible {
        return Ok(Endow2Bound {
            q_star,
            gamma_star: None,
            bound: None,
            feasible,
        });
    }
    let gamma_star = Interval::point(rational::int(32) * kappa).div(&q_star, bits);
    let bound = gamma_star
        .powi(beta, bits)
        .mul_round(&Interval::point(eta * rational::int(beta as i64)), bits);
    let (gamma_star, bound) = (Some(gamma_star), Some(bound));
    Ok(Endow2Bound {
        q_star,
        gamma_star,
        bound,
        feasible,
    })
}
