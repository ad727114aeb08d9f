//! Exact arithmetic over Q, Q[t] and Q(t).
//!
//! Rationals are `num_rational::BigRational`. Polynomials are dense
//! coefficient vectors in the variable `t`; rational functions keep a monic
//! denominator coprime to the numerator, so structural equality is field
//! equality.

mod factor;
mod modp;
mod poly;
mod ratfunc;

pub use factor::{factor, squarefree_factor, FactoredPolynomial};
pub(crate) use poly::forward_by_value;
pub use poly::Poly;
pub use ratfunc::RatFunc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Least common multiple of the denominators of `values` (1 for an empty list).
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn fractional_part(x: &Rational) -> Rational {
    x - x.floor()
}

/// Writes `n = s^2 * d` with `d` squarefree (sign kept in `d`). Returns `(s, d)`.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut rest = n.abs();
    let mut square = BigInt::one();
    let mut core = BigInt::one();
    let mut p = BigInt::from(2u32);
    // Trial division up to the cube root; what remains has at most two prime
    // factors, so it is squarefree unless it is a perfect square.
    while &p * &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                core *= &p;
            }
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if rest > BigInt::one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            square *= r;
        } else {
            core *= rest;
        }
    }
    (square, sign * core)
}
