//! The differential field (K, δ) with `δ(t) = c t^m` and `δ = 0` on Q.
//!
//! Membership in the Q-span 𝒜 of logarithmic derivatives reduces to a finite
//! linear system: for `v = u t^k ∏ p_i^{e_i}`,
//! `δ(v)/v = k c t^(m-1) + Σ e_i c t^m p_i'/p_i`, and every `p_i` with a
//! nonzero exponent produces a simple pole of `δ(v)/v`, hence divides the
//! denominator of any element it contributes to.

mod cascade;
mod group;

pub use cascade::{solve_cascade, CascadeSolution};
pub use group::{build_splitting_field, group_decompose, SGroupDecomposition, SplittingFieldDescription};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{factor, lcm_denominators, Poly, RatFunc, Rational};
use crate::linalg::Matrix;
use crate::tower::TowerElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffFieldError {
    #[error("the derivation coefficient c must be nonzero")]
    ZeroCoefficient,
    #[error("zero is trivially in the span; membership expects a nonzero element")]
    ZeroInput,
    #[error("element is not in the span of logarithmic derivatives")]
    NotInA,
    #[error("the set S is empty")]
    EmptyS,
    #[error("element {0} of S is zero")]
    ZeroElement(usize),
    #[error("bad input: {0}")]
    BadInput(String),
}

/// `δ_{c,m}`: `δ(t) = c t^m`, `δ(q) = 0` for `q` in Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivationSpec {
    c: Rational,
    m: i64,
}

impl DerivationSpec {
    pub fn new(c: Rational, m: i64) -> Result<Self, DiffFieldError> {
        if c.is_zero() {
            return Err(DiffFieldError::ZeroCoefficient);
        }
        Ok(DerivationSpec { c, m })
    }

    /// `δ(t) = t`.
    pub fn standard() -> Self {
        DerivationSpec { c: Rational::one(), m: 1 }
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn is_standard(&self) -> bool {
        self.m == 1 && self.c.is_one()
    }

    /// `δ(t) = c t^m`.
    pub fn delta_t(&self) -> RatFunc {
        RatFunc::t_pow(self.m).scale(&self.c)
    }

    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        if f.is_constant() {
            return RatFunc::zero();
        }
        &f.ddt() * &self.delta_t()
    }

    pub fn apply_poly(&self, p: &Poly) -> RatFunc {
        &RatFunc::from_poly(p.derivative()) * &self.delta_t()
    }

    /// `δ(p)/p` for a nonzero polynomial.
    pub fn log_derivative_poly(&self, p: &Poly) -> RatFunc {
        RatFunc::new(p.derivative(), p.clone()).expect("nonzero polynomial") * self.delta_t()
    }

    pub fn log_derivative(&self, f: &RatFunc) -> Result<RatFunc, DiffFieldError> {
        if f.is_zero() {
            return Err(DiffFieldError::ZeroInput);
        }
        Ok(&self.apply(f) / f)
    }

    /// An element `y` of K with `δ(y) = 1`, when one exists.
    ///
    /// For `m != 1` this is `t^(1-m) / (c (1-m))`; for `m = 1` no such
    /// element exists (its image would need a `1/t` term).
    pub fn primitive_of_one(&self) -> Option<RatFunc> {
        if self.m == 1 {
            return None;
        }
        let k = Rational::from_integer((1 - self.m).into());
        Some(RatFunc::t_pow(1 - self.m).scale(&(&self.c * &k).recip()))
    }

    /// Candidate logarithmic derivatives: `δ(t)/t` followed by `δ(p)/p`.
    fn candidates(&self, primes: &[Poly]) -> Vec<RatFunc> {
        let mut out = vec![self.log_derivative_poly(&Poly::t())];
        out.extend(primes.iter().map(|p| self.log_derivative_poly(p)));
        out
    }
}

impl Default for DerivationSpec {
    fn default() -> Self {
        Self::standard()
    }
}

impl fmt::Display for DerivationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c, self.m)
    }
}

/// Product of integer powers of monic irreducible polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PowerProduct {
    pub factors: Vec<(Poly, BigInt)>,
}

impl PowerProduct {
    pub fn value(&self) -> RatFunc {
        self.factors.iter().fold(RatFunc::one(), |acc, (p, e)| {
            let k = e.to_i64().expect("exponent fits in i64");
            &acc * &RatFunc::from_poly(p.clone()).pow(k).expect("nonzero base")
        })
    }

    /// `self^(1/n)` as a tower element.
    pub fn root(&self, n: &BigInt) -> TowerElement {
        let factors: Vec<(Poly, Rational)> = self
            .factors
            .iter()
            .map(|(p, e)| (p.clone(), Rational::new(e.clone(), n.clone())))
            .collect();
        TowerElement::power_product(&factors).expect("monic irreducible bases")
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| {
                let base = if *p == Poly::t() { "t".to_string() } else { format!("({p})") };
                if e.is_one() {
                    base
                } else if e.is_negative() {
                    format!("{base}^({e})")
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// `a = r0 δ(t)/t + Σ r_i δ(p_i)/p_i`, with `δ(v) = n_a a v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipWitness {
    pub r0: Rational,
    pub terms: Vec<(Poly, Rational)>,
    pub n_a: BigInt,
    pub v: PowerProduct,
}

impl MembershipWitness {
    /// Re-checks `a = r0 δ(t)/t + Σ r_i δ(p_i)/p_i` and `δ(v) = n_a a v`.
    pub fn verify(&self, spec: &DerivationSpec, a: &RatFunc) -> bool {
        let sum = self.terms.iter().fold(
            spec.log_derivative_poly(&Poly::t()).scale(&self.r0),
            |acc, (p, r)| &acc + &spec.log_derivative_poly(p).scale(r),
        );
        let v = self.v.value();
        let n = Rational::from_integer(self.n_a.clone());
        sum == *a && spec.apply(&v) == &a.scale(&n) * &v
    }

    /// Exponents over the bases `t, p_1, ...` of the solution `y` of `δy = a y`.
    pub fn exponents(&self) -> Vec<(Poly, Rational)> {
        let mut out = Vec::new();
        if !self.r0.is_zero() {
            out.push((Poly::t(), self.r0.clone()));
        }
        out.extend(self.terms.iter().cloned());
        out
    }

    /// `y = t^r0 ∏ p_i^r_i`, a solution of `δy = a y`.
    pub fn solution(&self) -> TowerElement {
        TowerElement::power_product(&self.exponents()).expect("monic irreducible bases")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    InA(MembershipWitness),
    NotInA,
}

impl Membership {
    pub fn witness(&self) -> Option<&MembershipWitness> {
        match self {
            Membership::InA(w) => Some(w),
            Membership::NotInA => None,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, Membership::InA(_))
    }
}

/// Numerator coefficient vectors over a common denominator, padded to a common length.
pub(crate) fn numerator_coords(elems: &[RatFunc]) -> Vec<Vec<Rational>> {
    let l = elems.iter().fold(Poly::one(), |acc, e| Poly::lcm(&acc, e.den()));
    let nums: Vec<Poly> = elems.iter().map(|e| e.num() * &l.div_exact(e.den())).collect();
    let len = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    nums.iter().map(|p| (0..len).map(|i| p.coeff(i)).collect()).collect()
}

/// Some `x` with `Σ x_i vectors[i] = target`, free variables set to zero.
pub(crate) fn solve_combination(vectors: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = vectors.len();
    let rows = target.len();
    let mut data = Vec::with_capacity(rows * (k + 1));
    for i in 0..rows {
        for v in vectors {
            data.push(v[i].clone());
        }
        data.push(target[i].clone());
    }
    let (r, pivots) = Matrix::new(rows, k + 1, data).expect("consistent shape").rref();
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, k).clone();
    }
    Some(x)
}

/// Monic irreducible factors of the denominator other than `t`.
pub(crate) fn pole_primes(dens: impl IntoIterator<Item = Poly>) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    for d in dens {
        if d.is_constant() {
            continue;
        }
        for (p, _) in factor(&d).expect("nonzero denominator").factors {
            if p != Poly::t() && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// Decides `a ∈ 𝒜` and produces a witness.
pub fn membership_a(spec: &DerivationSpec, a: &RatFunc) -> Result<Membership, DiffFieldError> {
    if a.is_zero() {
        return Err(DiffFieldError::ZeroInput);
    }
    let primes = pole_primes([a.den().clone()]);
    let mut elems = spec.candidates(&primes);
    elems.push(a.clone());
    let coords = numerator_coords(&elems);
    let (target, cands) = coords.split_last().expect("nonempty");
    let Some(x) = solve_combination(cands, target) else {
        return Ok(Membership::NotInA);
    };
    let n_a = lcm_denominators(&x);
    let r0 = x[0].clone();
    let terms: Vec<(Poly, Rational)> =
        primes.into_iter().zip(x.into_iter().skip(1)).filter(|(_, r)| !r.is_zero()).collect();
    let n = Rational::from_integer(n_a.clone());
    let mut factors = Vec::new();
    if !r0.is_zero() {
        factors.push((Poly::t(), (&r0 * &n).to_integer()));
    }
    factors.extend(terms.iter().map(|(p, r)| (p.clone(), (r * &n).to_integer())));
    let witness = MembershipWitness { r0, terms, n_a, v: PowerProduct { factors } };
    debug_assert!(witness.verify(spec, a));
    Ok(Membership::InA(witness))
}

/// The minimal `n > 0` with `δ(y) = n a y` solvable in K.
pub fn minimal_multiplier(spec: &DerivationSpec, a: &RatFunc) -> Result<BigInt, DiffFieldError> {
    if a.is_zero() {
        return Ok(BigInt::one());
    }
    match membership_a(spec, a)? {
        Membership::InA(w) => Ok(w.n_a),
        Membership::NotInA => Err(DiffFieldError::NotInA),
    }
}
