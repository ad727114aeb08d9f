use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{decide_finite_splitting, polynomial_entries, require_traceless, to_k, SplittingError};
use crate::arith::{Poly, RatFunc, Rational};
use crate::diff_field::{build_splitting_field, membership_a, solve_cascade, DerivationSpec, SplittingFieldDescription};
use crate::linalg::{jordan_form_rational, rational_eigen_decomp, LinalgError, Matrix};
use crate::tower::TowerElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    ConstantDiagonalizable,
    DiagonalInA,
    UpperTriangular,
    GeneralRationalJordan,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Construction::ConstantDiagonalizable => "ConstantDiagonalizable",
            Construction::DiagonalInA => "DiagonalInA",
            Construction::UpperTriangular => "UpperTriangular",
            Construction::GeneralRationalJordan => "GeneralRationalJordan",
        };
        write!(f, "{s}")
    }
}

/// A fundamental matrix `Z` over a tower with `δ(Z) = P^T Z`, `det Z != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingCertificate {
    pub p: Matrix<RatFunc>,
    pub spec: DerivationSpec,
    pub field: SplittingFieldDescription,
    pub z: Matrix<TowerElement>,
    pub construction: Construction,
}

impl SplittingCertificate {
    pub fn verify(&self) -> Result<bool, SplittingError> {
        verify_certificate(&self.p, self)
    }

    fn checked(self) -> Result<Self, SplittingError> {
        if self.verify()? {
            Ok(self)
        } else {
            Err(SplittingError::VerificationFailed)
        }
    }
}

pub fn derive_matrix(spec: &DerivationSpec, z: &Matrix<TowerElement>) -> Matrix<TowerElement> {
    z.map(|x| x.derive(spec))
}

fn lift(p: &Matrix<RatFunc>) -> Matrix<TowerElement> {
    p.map(|x| TowerElement::from_ratfunc(x.clone()))
}

fn lift_q(p: &Matrix<Rational>) -> Matrix<TowerElement> {
    p.map(|x| TowerElement::from_rational(x.clone()))
}

/// Checks `δ(Z) = P^T Z` and `det Z != 0` under the certificate's derivation.
pub fn verify_certificate(p: &Matrix<RatFunc>, cert: &SplittingCertificate) -> Result<bool, SplittingError> {
    let n = p.require_square().map_err(|_| SplittingError::ShapeMismatch(p.shape(), cert.z.shape()))?;
    if cert.z.shape() != (n, n) {
        return Err(SplittingError::ShapeMismatch(p.shape(), cert.z.shape()));
    }
    let lhs = derive_matrix(&cert.spec, &cert.z);
    let rhs = &lift(&p.transpose()) * &cert.z;
    if lhs != rhs {
        return Ok(false);
    }
    Ok(!cert.z.determinant().map_err(SplittingError::Linalg)?.is_zero())
}

/// Field generated by solutions for the distinct nonzero elements of `set`.
fn field_for(spec: &DerivationSpec, set: &[RatFunc]) -> Result<(SplittingFieldDescription, Vec<(RatFunc, TowerElement)>), SplittingError> {
    let mut distinct: Vec<RatFunc> = Vec::new();
    for a in set {
        if !a.is_zero() && !distinct.contains(a) {
            distinct.push(a.clone());
        }
    }
    if distinct.is_empty() {
        return Ok((SplittingFieldDescription::base(), Vec::new()));
    }
    Ok(build_splitting_field(spec, &distinct)?)
}

/// `(R^{-1})^T U R^T` with `U = diag(Y_b)` and `R^{-1} P R` block diagonal.
fn conjugated(r: &Matrix<Rational>, u: &Matrix<TowerElement>) -> Result<Matrix<TowerElement>, SplittingError> {
    let rinv = r.inverse().map_err(SplittingError::Linalg)?;
    Ok(&(&lift_q(&rinv.transpose()) * u) * &lift_q(&r.transpose()))
}

fn require_finite(p: &Matrix<Rational>) -> Result<(), SplittingError> {
    let d = decide_finite_splitting(p)?;
    if !d.finite_splitting_exists {
        return Err(SplittingError::PreconditionFailed(format!("no finite splitting: {}", d.reason)));
    }
    Ok(())
}

/// Constant diagonalizable `P` with rational eigenvalues:
/// `Z = (R^{-1})^T diag(t^λ_i) R^T`.
pub fn construct_certificate_constant(p: &Matrix<Rational>) -> Result<SplittingCertificate, SplittingError> {
    require_finite(p)?;
    let spec = DerivationSpec::standard();
    let (r, d) = rational_eigen_decomp(p).map_err(SplittingError::Linalg)?;
    let n = p.rows();
    let eigs: Vec<Rational> = (0..n).map(|i| d.get(i, i).clone()).collect();
    let u = Matrix::diagonal(eigs.iter().map(|l| TowerElement::t_power(l.clone())).collect());
    let set: Vec<RatFunc> = eigs.iter().map(|l| RatFunc::constant(l.clone())).collect();
    let (field, _) = field_for(&spec, &set)?;
    SplittingCertificate {
        p: to_k(p),
        spec,
        field,
        z: conjugated(&r, &u)?,
        construction: Construction::ConstantDiagonalizable,
    }
    .checked()
}

/// Diagonal `P` over K whose entries all lie in the span of logarithmic derivatives.
pub fn construct_certificate_diagonal(
    spec: &DerivationSpec,
    p: &Matrix<RatFunc>,
) -> Result<SplittingCertificate, SplittingError> {
    let n = require_traceless(p)?;
    if !p.is_diagonal() {
        return Err(SplittingError::PreconditionFailed("matrix is not diagonal".into()));
    }
    let diag: Vec<RatFunc> = (0..n).map(|i| p.get(i, i).clone()).collect();
    for (i, a) in diag.iter().enumerate() {
        if !a.is_zero() && !membership_a(spec, a)?.is_member() {
            return Err(SplittingError::NotInA(i + 1));
        }
    }
    let (field, sols) = field_for(spec, &diag)?;
    let entries: Vec<TowerElement> = diag
        .iter()
        .map(|a| {
            if a.is_zero() {
                TowerElement::one()
            } else {
                sols.iter().find(|(b, _)| b == a).expect("solution for each entry").1.clone()
            }
        })
        .collect();
    SplittingCertificate {
        p: p.clone(),
        spec: spec.clone(),
        field,
        z: Matrix::diagonal(entries),
        construction: Construction::DiagonalInA,
    }
    .checked()
}

/// Upper triangular `P` with polynomial entries and constant diagonal, where
/// no `p_jj - p_ii` (`j < i`) is a non-positive integer. Solves for a lower triangular `Z`
/// with `z_ij = r_ij t^(p_jj)`, `r_ij` polynomial.
pub fn construct_certificate_triangular(p: &Matrix<RatFunc>) -> Result<SplittingCertificate, SplittingError> {
    let n = require_traceless(p)?;
    if !p.is_upper_triangular() {
        return Err(SplittingError::PreconditionFailed("matrix is not upper triangular".into()));
    }
    let polys = polynomial_entries(p).ok_or(SplittingError::NotPolynomialEntries)?;
    let diag: Vec<Rational> = (0..n)
        .map(|i| p.get(i, i).as_constant())
        .collect::<Option<_>>()
        .ok_or_else(|| SplittingError::PreconditionFailed("diagonal entries must be constant".into()))?;
    // The recursion divides by l + p_jj - p_ii (j < i, l >= 0), so only
    // differences in {0, -1, -2, ...} are fatal.
    for j in 0..n {
        for i in j + 1..n {
            let shift = &diag[j] - &diag[i];
            if shift.is_integer() && shift <= Rational::zero() {
                return Err(SplittingError::CongruenceViolation(j + 1, i + 1));
            }
        }
    }
    let spec = DerivationSpec::standard();
    // r[i][j] for i >= j; t r' + (p_jj - p_ii) r = Σ_{k=j}^{i-1} p_ki r_kj
    let mut r: Vec<Vec<Poly>> = vec![vec![Poly::zero(); n]; n];
    for j in 0..n {
        r[j][j] = Poly::one();
        for i in j + 1..n {
            let f = (j..i).fold(Poly::zero(), |acc, k| &acc + &(&polys[k][i] * &r[k][j]));
            let shift = &diag[j] - &diag[i];
            let coeffs: Vec<Rational> = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(l, a)| a / &(&Rational::from_integer(BigInt::from(l)) + &shift))
                .collect();
            r[i][j] = Poly::from_coeffs(coeffs);
        }
    }
    let mut z = Matrix::zeros(n, n);
    for j in 0..n {
        let u = TowerElement::t_power(diag[j].clone());
        for i in j..n {
            z.set(i, j, &TowerElement::from_ratfunc(RatFunc::from_poly(r[i][j].clone())) * &u);
        }
    }
    let set: Vec<RatFunc> = diag.iter().map(|l| RatFunc::constant(l.clone())).collect();
    let (field, _) = field_for(&spec, &set)?;
    SplittingCertificate { p: p.clone(), spec, field, z, construction: Construction::UpperTriangular }.checked()
}

/// Constant `P` with rational eigenvalues. Diagonalizable input gives the
/// constant construction; otherwise Jordan chains become cascades in `w`.
pub fn construct_certificate_general_rational(p: &Matrix<Rational>) -> Result<SplittingCertificate, SplittingError> {
    require_traceless(p)?;
    let jd = jordan_form_rational(p).map_err(|e| match e {
        LinalgError::NotAllRational => SplittingError::NotAllRational,
        other => SplittingError::Linalg(other),
    })?;
    if jd.blocks.iter().all(|(_, s)| *s == 1) {
        return construct_certificate_constant(p);
    }
    let spec = DerivationSpec::standard();
    let n = p.rows();
    let w = TowerElement::w();
    let mut y = Matrix::zeros(n, n);
    let mut at = 0;
    for (lambda, size) in &jd.blocks {
        let a = RatFunc::constant(lambda.clone());
        let u = TowerElement::t_power(lambda.clone());
        let cascade = solve_cascade(&spec, &a, *size, &u, &w)?;
        for i in 0..*size {
            for j in 0..=i {
                y.set(at + i, at + j, cascade.entries[i - j].clone());
            }
        }
        at += size;
    }
    let set: Vec<RatFunc> = jd.blocks.iter().map(|(l, _)| RatFunc::constant(l.clone())).collect();
    let (field, _) = field_for(&spec, &set)?;
    SplittingCertificate {
        p: to_k(p),
        spec: spec.clone(),
        field: field.with_w(&spec),
        z: conjugated(&jd.transform, &y)?,
        construction: Construction::GeneralRationalJordan,
    }
    .checked()
}

/// Transports a solution for `A` to `B = Qc A Qc^{-1}`: `(Qc^{-1})^T Z Qc^T`.
pub fn conjugate_solution(
    spec: &DerivationSpec,
    qc: &Matrix<Rational>,
    z: &Matrix<TowerElement>,
    a: &Matrix<RatFunc>,
) -> Result<Matrix<TowerElement>, SplittingError> {
    let n = a.require_square().map_err(SplittingError::from_linalg)?;
    if qc.shape() != (n, n) || z.shape() != (n, n) {
        return Err(SplittingError::ShapeMismatch(a.shape(), qc.shape()));
    }
    if derive_matrix(spec, z) != &lift(&a.transpose()) * z {
        return Err(SplittingError::PreconditionFailed("Z does not solve the system for A".into()));
    }
    let qinv = qc.inverse().map_err(|_| SplittingError::SingularH)?;
    let z1 = conjugated(qc, z)?;
    let b = &(&to_k(qc) * a) * &to_k(&qinv);
    debug_assert_eq!(derive_matrix(spec, &z1), &lift(&b.transpose()) * &z1);
    Ok(z1)
}
