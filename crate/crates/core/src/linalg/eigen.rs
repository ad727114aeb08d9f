use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{normalize_leading, LinalgError, Matrix};
use crate::arith::{factor, squarefree_decompose, Poly, Rational};

/// `det(xI - M)` by fraction-free (Bareiss) elimination over Q[x].
pub fn charpoly(m: &Matrix<Rational>) -> Result<Poly, LinalgError> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Poly::one());
    }
    let mut a: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = Poly::constant(-m.get(i, j).clone());
                    if i == j {
                        &c + &Poly::t()
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let i = (k + 1..n)
                .find(|&i| !a[i][k].is_zero())
                .expect("characteristic matrix is nonsingular");
            a.swap(k, i);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Minimal polynomial from the first linear dependence among `I, M, M^2, ...`.
pub fn minpoly(m: &Matrix<Rational>) -> Result<Poly, LinalgError> {
    let n = m.require_square()?;
    // Reduced vectors with their pivot and their expression in the powers.
    let mut basis: Vec<(usize, Vec<Rational>, Vec<Rational>)> = Vec::new();
    let mut power: Matrix<Rational> = Matrix::identity(n);
    for d in 0..=n {
        let mut v = power.data().to_vec();
        let mut combo = vec![Rational::zero(); d + 1];
        combo[d] = Rational::one();
        for (p, bv, bc) in &basis {
            if v[*p].is_zero() {
                continue;
            }
            let f = &v[*p] / &bv[*p];
            for (x, y) in v.iter_mut().zip(bv) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            for (x, y) in combo.iter_mut().zip(bc) {
                *x -= &f * y;
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => return Ok(Poly::from_coeffs(combo)),
            Some(p) => basis.push((p, v, combo)),
        }
        power = power.try_mul(m)?;
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

pub fn is_diagonalizable(m: &Matrix<Rational>) -> Result<bool, LinalgError> {
    let mp = minpoly(m)?;
    Ok(Poly::gcd(&mp, &mp.derivative()).is_constant())
}

/// Rational eigenvalues with algebraic multiplicities, or `None` when the
/// characteristic polynomial has an irreducible factor of degree at least 2.
/// Sorted in decreasing order.
pub fn rational_eigenvalues(m: &Matrix<Rational>) -> Result<Option<Vec<(Rational, usize)>>, LinalgError> {
    let f = factor(&charpoly(m)?).expect("characteristic polynomial is monic");
    if f.factors.iter().any(|(p, _)| p.degree() != Some(1)) {
        return Ok(None);
    }
    let mut roots = f.rational_roots();
    roots.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(Some(roots))
}

/// `(R, D)` with `R^{-1} M R = D` diagonal, eigenvalues decreasing, each
/// eigenvector scaled to have first nonzero entry 1.
pub fn rational_eigen_decomp(
    m: &Matrix<Rational>,
) -> Result<(Matrix<Rational>, Matrix<Rational>), LinalgError> {
    let n = m.require_square()?;
    let eigs = rational_eigenvalues(m)?.ok_or(LinalgError::NotAllRational)?;
    if !is_diagonalizable(m)? {
        return Err(LinalgError::NotDiagonalizable);
    }
    let mut columns = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for (lambda, mult) in eigs {
        let shifted = m.try_sub(&Matrix::identity(n).scale(&lambda))?;
        let vecs = shifted.nullspace();
        debug_assert_eq!(vecs.len(), mult);
        for mut v in vecs {
            normalize_leading(&mut v);
            columns.push(v);
            diag.push(lambda.clone());
        }
    }
    Ok((Matrix::from_columns(&columns)?, Matrix::diagonal(diag)))
}

/// `rational_part + surd_coeff * sqrt(surd)` with `surd` squarefree, not 0 or 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticNumber {
    pub rational_part: Rational,
    pub surd_coeff: Rational,
    pub surd: BigInt,
}

impl QuadraticNumber {
    /// The two roots of a monic irreducible quadratic, `+` root first.
    pub fn roots_of(p: &Poly) -> (QuadraticNumber, QuadraticNumber) {
        assert_eq!(p.degree(), Some(2), "quadratic expected");
        let p = p.monic();
        let half_b = p.coeff(1) / Rational::from_integer(2.into());
        let disc = &half_b * &half_b - p.coeff(0);
        // sqrt(N/D) = sqrt(N D) / D
        let nd = disc.numer() * disc.denom();
        let (s, d) = squarefree_decompose(&nd);
        let coeff = Rational::new(s, disc.denom().clone());
        let plus = QuadraticNumber { rational_part: -half_b.clone(), surd_coeff: coeff.clone(), surd: d.clone() };
        let minus = QuadraticNumber { rational_part: -half_b, surd_coeff: -coeff, surd: d };
        (plus, minus)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.surd_coeff.is_negative() { "-" } else { "+" };
        let c = self.surd_coeff.abs();
        let surd = if c.is_one() { format!("sqrt({})", self.surd) } else { format!("{c}*sqrt({})", self.surd) };
        if self.rational_part.is_zero() {
            let lead = if sign == "-" { "-" } else { "" };
            write!(f, "{lead}{surd}")
        } else {
            write!(f, "{} {sign} {surd}", self.rational_part)
        }
    }
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Eigenvalue data of a rational matrix, read off the factored
/// characteristic polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenData {
    pub char_poly: Poly,
    pub rational_eigs: Vec<(Rational, usize)>,
    pub quad_eigs: Vec<(QuadraticNumber, usize)>,
    /// Irreducible factors of degree at least 3 with multiplicities.
    pub unsupported_factors: Vec<(Poly, usize)>,
    pub diagonalizable: bool,
}

impl EigenData {
    pub fn is_supported(&self) -> bool {
        self.unsupported_factors.is_empty()
    }

    pub fn all_rational(&self) -> bool {
        self.quad_eigs.is_empty() && self.unsupported_factors.is_empty()
    }

    /// Rational eigenvalues repeated by multiplicity, decreasing.
    pub fn rational_multiset(&self) -> Vec<Rational> {
        self.rational_eigs
            .iter()
            .flat_map(|(l, k)| std::iter::repeat_n(l.clone(), *k))
            .collect()
    }
}

pub fn quadratic_eigendata(m: &Matrix<Rational>) -> Result<EigenData, LinalgError> {
    let char_poly = charpoly(m)?;
    let f = factor(&char_poly).expect("characteristic polynomial is monic");
    let mut rational_eigs = Vec::new();
    let mut quad_eigs = Vec::new();
    let mut unsupported_factors = Vec::new();
    for (p, e) in &f.factors {
        match p.degree() {
            Some(1) => rational_eigs.push((-p.coeff(0), *e)),
            Some(2) => {
                let (a, b) = QuadraticNumber::roots_of(p);
                quad_eigs.push((a, *e));
                quad_eigs.push((b, *e));
            }
            _ => unsupported_factors.push((p.clone(), *e)),
        }
    }
    rational_eigs.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(EigenData {
        char_poly,
        rational_eigs,
        quad_eigs,
        unsupported_factors,
        diagonalizable: is_diagonalizable(m)?,
    })
}
