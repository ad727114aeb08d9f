use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{RatFunc, Rational};
use crate::diff_field::DerivationSpec;

/// Polynomial in the primitive `w` with coefficients in K, low degree first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WPoly(Vec<RatFunc>);

impl WPoly {
    pub fn new(mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        WPoly(coeffs)
    }

    pub fn constant(c: RatFunc) -> Self {
        Self::new(vec![c])
    }

    pub fn w() -> Self {
        WPoly(vec![RatFunc::zero(), RatFunc::one()])
    }

    /// `c * w^k`.
    pub fn monomial(c: RatFunc, k: usize) -> Self {
        let mut v = vec![RatFunc::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn as_constant(&self) -> Option<RatFunc> {
        match self.0.len() {
            0 => Some(RatFunc::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        Self::new(self.0.iter().map(|x| x * c).collect())
    }

    /// `Σ δ(c_j) w^j + j c_j w^(j-1)`.
    pub fn derive(&self, spec: &DerivationSpec) -> Self {
        let n = self.0.len();
        let mut out = vec![RatFunc::zero(); n];
        for (j, c) in self.0.iter().enumerate() {
            out[j] = &out[j] + &spec.apply(c);
            if j > 0 {
                out[j - 1] = &out[j - 1] + &c.scale(&Rational::from_integer(j.into()));
            }
        }
        Self::new(out)
    }
}

impl fmt::Display for WPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.to_string();
            let atom = !cs.contains(' ');
            let wpart = match k {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{k}"),
            };
            match (k, c.is_one(), atom) {
                (0, _, _) => write!(f, "{cs}")?,
                (_, true, _) => write!(f, "{wpart}")?,
                (_, false, true) => write!(f, "{cs}*{wpart}")?,
                (_, false, false) => write!(f, "({cs})*{wpart}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WPoly({self})")
    }
}

impl Zero for WPoly {
    fn zero() -> Self {
        WPoly(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl One for WPoly {
    fn one() -> Self {
        WPoly(vec![RatFunc::one()])
    }
}

impl Add<&WPoly> for &WPoly {
    type Output = WPoly;
    fn add(self, rhs: &WPoly) -> WPoly {
        let n = self.0.len().max(rhs.0.len());
        WPoly::new(
            (0..n)
                .map(|i| match (self.0.get(i), rhs.0.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => RatFunc::zero(),
                })
                .collect(),
        )
    }
}

impl Neg for &WPoly {
    type Output = WPoly;
    fn neg(self) -> WPoly {
        WPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub<&WPoly> for &WPoly {
    type Output = WPoly;
    fn sub(self, rhs: &WPoly) -> WPoly {
        self + &(-rhs)
    }
}

impl Mul<&WPoly> for &WPoly {
    type Output = WPoly;
    fn mul(self, rhs: &WPoly) -> WPoly {
        if self.is_zero() || rhs.is_zero() {
            return WPoly::zero();
        }
        let mut out = vec![RatFunc::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        WPoly::new(out)
    }
}

crate::arith::forward_by_value!(WPoly, Add add, Sub sub, Mul mul);
