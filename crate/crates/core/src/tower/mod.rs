//! Differential extension towers over K = Q(t).
//!
//! Elements are finite sums `c(w) * m` where `c(w)` is a polynomial in the
//! primitive `w` (`δw = 1`) with coefficients in K and `m` is a monomial in
//! radical generators `p^(e)` (`p` monic irreducible, `0 < e < 1`) and
//! exponential generators `X{a}^k` (`δX{a} = a X{a}`, `k` a nonzero integer).
//! Integer parts of radical exponents are folded into the coefficient, so
//! distinct monomials are linearly independent over K(w) and the term map is
//! a normal form.

mod wpoly;

pub use wpoly::WPoly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{fractional_part, Poly, RatFunc, Rational};
use crate::diff_field::DerivationSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("only single-term elements free of w can be inverted")]
    NonInvertible,
    #[error("exponent of an exponential generator must be an integer, got {0}")]
    NonIntegerExponent(Rational),
    #[error("radical base must be a monic irreducible polynomial, got {0}")]
    BadRadicalBase(Poly),
    #[error("exponential generator needs a nonzero element")]
    ZeroExpGenerator,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `p^(e)` for a monic irreducible `p`.
    Root(Poly),
    /// `X{a}` with `δX{a} = a X{a}`.
    Exp(RatFunc),
}

impl Generator {
    /// `δ(g)/g` for a unit exponent (spec-dependent only for radicals).
    pub fn log_derivative(&self, spec: &DerivationSpec) -> RatFunc {
        match self {
            Generator::Root(p) => spec.log_derivative_poly(p),
            Generator::Exp(a) => a.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(BTreeMap<Generator, Rational>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &BTreeMap<Generator, Rational> {
        &self.0
    }

    /// Product with the integer parts split off into a K factor.
    fn mul(&self, other: &Monomial) -> (RatFunc, Monomial) {
        let mut exps = self.0.clone();
        for (g, e) in &other.0 {
            let cur = exps.remove(g).unwrap_or_else(Rational::zero);
            exps.insert(g.clone(), cur + e);
        }
        Self::normalize(exps)
    }

    fn normalize(exps: BTreeMap<Generator, Rational>) -> (RatFunc, Monomial) {
        let mut factor = RatFunc::one();
        let mut out = BTreeMap::new();
        for (g, e) in exps {
            match &g {
                Generator::Root(p) => {
                    let frac = fractional_part(&e);
                    let whole = (&e - &frac).to_integer();
                    if !whole.is_zero() {
                        let k = whole.to_i64().expect("exponent fits in i64");
                        factor = &factor * &RatFunc::from_poly(p.clone()).pow(k).expect("nonzero base");
                    }
                    if !frac.is_zero() {
                        out.insert(g, frac);
                    }
                }
                Generator::Exp(_) => {
                    if !e.is_zero() {
                        out.insert(g, e);
                    }
                }
            }
        }
        (factor, Monomial(out))
    }

    fn inverse(&self) -> (RatFunc, Monomial) {
        Self::normalize(self.0.iter().map(|(g, e)| (g.clone(), -e)).collect())
    }

    pub fn log_derivative(&self, spec: &DerivationSpec) -> RatFunc {
        self.0
            .iter()
            .fold(RatFunc::zero(), |acc, (g, e)| &acc + &g.log_derivative(spec).scale(e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match g {
                Generator::Root(p) if *p == Poly::t() => write!(f, "t^({e})")?,
                Generator::Root(p) => write!(f, "({p})^({e})")?,
                Generator::Exp(a) => {
                    write!(f, "X{{{a}}}")?;
                    if e.is_negative() {
                        write!(f, "^({e})")?;
                    } else if !e.is_one() {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Element of the tower in normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TowerElement {
    terms: BTreeMap<Monomial, WPoly>,
}

impl TowerElement {
    pub fn from_ratfunc(c: RatFunc) -> Self {
        Self::term(WPoly::constant(c), Monomial::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_ratfunc(RatFunc::constant(c))
    }

    /// The primitive `w` with `δw = 1`.
    pub fn w() -> Self {
        Self::term(WPoly::w(), Monomial::one())
    }

    pub fn w_poly(c: WPoly) -> Self {
        Self::term(c, Monomial::one())
    }

    /// `c * m` for an already normalized monomial.
    pub fn term(c: WPoly, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        TowerElement { terms }
    }

    /// `p^e` for a monic irreducible `p` and any rational `e`.
    pub fn root_power(p: &Poly, e: Rational) -> Result<Self, TowerError> {
        if !p.is_monic() || p.is_constant() {
            return Err(TowerError::BadRadicalBase(p.clone()));
        }
        let (f, m) = Monomial::normalize(BTreeMap::from([(Generator::Root(p.clone()), e)]));
        Ok(Self::term(WPoly::constant(f), m))
    }

    /// `t^e`.
    pub fn t_power(e: Rational) -> Self {
        Self::root_power(&Poly::t(), e).expect("t is monic irreducible")
    }

    /// Product of powers of monic irreducibles.
    pub fn power_product(factors: &[(Poly, Rational)]) -> Result<Self, TowerError> {
        factors
            .iter()
            .try_fold(Self::one(), |acc, (p, e)| Ok(&acc * &Self::root_power(p, e.clone())?))
    }

    /// `X{a}^k`.
    pub fn exp_gen(a: &RatFunc, k: &Rational) -> Result<Self, TowerError> {
        if a.is_zero() {
            return Err(TowerError::ZeroExpGenerator);
        }
        if !k.is_integer() {
            return Err(TowerError::NonIntegerExponent(k.clone()));
        }
        let (f, m) = Monomial::normalize(BTreeMap::from([(Generator::Exp(a.clone()), k.clone())]));
        Ok(Self::term(WPoly::constant(f), m))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &WPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    /// The value in K, if the element has no generators and no `w`.
    pub fn as_ratfunc(&self) -> Option<RatFunc> {
        if self.terms.is_empty() {
            return Some(RatFunc::zero());
        }
        let (m, c) = self.terms.iter().next().expect("nonempty");
        (self.terms.len() == 1 && m.is_one()).then(|| c.as_constant()).flatten()
    }

    pub fn w_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(WPoly::degree).max()
    }

    /// All generators occurring with a nonzero exponent.
    pub fn generators(&self) -> Vec<Generator> {
        let mut gens: Vec<Generator> = self.terms.keys().flat_map(|m| m.0.keys().cloned()).collect();
        gens.sort();
        gens.dedup();
        gens
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TowerElement { terms: self.terms.iter().map(|(m, p)| (m.clone(), p.scale(c))).collect() }
    }

    fn add_term(terms: &mut BTreeMap<Monomial, WPoly>, m: Monomial, c: WPoly) {
        if c.is_zero() {
            return;
        }
        match terms.remove(&m) {
            None => {
                terms.insert(m, c);
            }
            Some(cur) => {
                let s = &cur + &c;
                if !s.is_zero() {
                    terms.insert(m, s);
                }
            }
        }
    }

    /// Exact derivation: `δw = 1`, `δ` on K from `spec`, and generator rules.
    pub fn derive(&self, spec: &DerivationSpec) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = &c.derive(spec) + &c.scale(&m.log_derivative(spec));
            Self::add_term(&mut terms, m.clone(), d);
        }
        TowerElement { terms }
    }

    pub fn inv(&self) -> Result<Self, TowerError> {
        if self.terms.len() != 1 {
            return Err(TowerError::NonInvertible);
        }
        let (m, c) = self.terms.iter().next().expect("one term");
        let c = c.as_constant().ok_or(TowerError::NonInvertible)?;
        let (f, mi) = m.inverse();
        let coeff = &c.inv().map_err(|_| TowerError::NonInvertible)? * &f;
        Ok(Self::term(WPoly::constant(coeff), mi))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn pow_signed(&self, e: &BigInt) -> Result<Self, TowerError> {
        let k = e.abs().to_u32().expect("exponent fits in u32");
        let p = self.pow(k);
        if e.is_negative() {
            p.inv()
        } else {
            Ok(p)
        }
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower({self})")
    }
}

impl Zero for TowerElement {
    fn zero() -> Self {
        TowerElement { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for TowerElement {
    fn one() -> Self {
        Self::from_ratfunc(RatFunc::one())
    }
}

impl From<RatFunc> for TowerElement {
    fn from(c: RatFunc) -> Self {
        Self::from_ratfunc(c)
    }
}

impl Add<&TowerElement> for &TowerElement {
    type Output = TowerElement;
    fn add(self, rhs: &TowerElement) -> TowerElement {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            TowerElement::add_term(&mut terms, m.clone(), c.clone());
        }
        TowerElement { terms }
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        TowerElement { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Sub<&TowerElement> for &TowerElement {
    type Output = TowerElement;
    fn sub(self, rhs: &TowerElement) -> TowerElement {
        self + &(-rhs)
    }
}

impl Mul<&TowerElement> for &TowerElement {
    type Output = TowerElement;
    fn mul(self, rhs: &TowerElement) -> TowerElement {
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let (f, m) = m1.mul(m2);
                let c = &c1.scale(&f) * c2;
                TowerElement::add_term(&mut terms, m, c);
            }
        }
        TowerElement { terms }
    }
}

crate::arith::forward_by_value!(TowerElement, Add add, Sub sub, Mul mul);
