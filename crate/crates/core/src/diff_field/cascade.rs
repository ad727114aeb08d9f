use num_bigint::BigInt;
use num_traits::One;

use super::{DerivationSpec, DiffFieldError};
use crate::arith::{RatFunc, Rational};
use crate::tower::TowerElement;

/// `y_1 = u_a`, `δ(y_i) = y_{i-1} + a y_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeSolution {
    pub a: RatFunc,
    pub entries: Vec<TowerElement>,
}

impl CascadeSolution {
    pub fn verify(&self, spec: &DerivationSpec) -> bool {
        let a = TowerElement::from_ratfunc(self.a.clone());
        self.entries.iter().enumerate().all(|(i, y)| {
            let rhs = if i == 0 { &a * y } else { &self.entries[i - 1] + &(&a * y) };
            y.derive(spec) == rhs
        })
    }
}

/// `y_i = w^(i-1)/(i-1)! * u_a`, all further integration constants zero.
pub fn solve_cascade(
    spec: &DerivationSpec,
    a: &RatFunc,
    k: usize,
    u_a: &TowerElement,
    w: &TowerElement,
) -> Result<CascadeSolution, DiffFieldError> {
    if k == 0 {
        return Err(DiffFieldError::BadInput("cascade length must be positive".into()));
    }
    let a_t = TowerElement::from_ratfunc(a.clone());
    if u_a.derive(spec) != &a_t * u_a {
        return Err(DiffFieldError::BadInput("u_a does not satisfy δ(u) = a u".into()));
    }
    if w.derive(spec) != TowerElement::one() {
        return Err(DiffFieldError::BadInput("w does not satisfy δ(w) = 1".into()));
    }
    let mut entries = Vec::with_capacity(k);
    let mut wpow = TowerElement::one();
    let mut fact = BigInt::one();
    for i in 0..k {
        if i > 0 {
            wpow = &wpow * w;
            fact *= i;
        }
        let c = Rational::new(BigInt::one(), fact.clone());
        entries.push(&wpow.scale(&RatFunc::constant(c)) * u_a);
    }
    let sol = CascadeSolution { a: a.clone(), entries };
    if !sol.verify(spec) {
        return Err(DiffFieldError::BadInput("cascade equations failed".into()));
    }
    Ok(sol)
}
