//! Decisions, constructions and verifiers for `(M_n(K), D_P)` with
//! `D_P(X) = δ(X) + PX - XP`, `P` traceless.

mod certificate;

pub use certificate::{
    conjugate_solution, construct_certificate_constant, construct_certificate_diagonal,
    construct_certificate_general_rational, construct_certificate_triangular, derive_matrix,
    verify_certificate, Construction, SplittingCertificate,
};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{factor, fractional_part, lcm_denominators, Poly, RatFunc, Rational};
use crate::diff_field::{DerivationSpec, DiffFieldError};
use crate::linalg::{self, LinalgError, Matrix, QuadraticNumber};
use crate::tower::TowerError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplittingError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not traceless (trace {0})")]
    NotTraceless(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("diagonal entry {0} is not in the span of logarithmic derivatives")]
    NotInA(usize),
    #[error("diagonal entries {0} and {1} are congruent modulo Z")]
    CongruenceViolation(usize, usize),
    #[error("entries above the diagonal must be polynomials with constant diagonal")]
    NotPolynomialEntries,
    #[error("not all eigenvalues are rational")]
    NotAllRational,
    #[error("gauge matrix H is singular")]
    SingularH,
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("constructed certificate failed verification")]
    VerificationFailed,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    DiffField(#[from] DiffFieldError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

impl SplittingError {
    fn from_linalg(e: LinalgError) -> Self {
        match e {
            LinalgError::NonSquare { rows, cols } => SplittingError::NonSquare { rows, cols },
            LinalgError::NotAllRational => SplittingError::NotAllRational,
            other => SplittingError::Linalg(other),
        }
    }
}

/// Checks squareness and zero trace; returns the size.
pub fn require_traceless<T: linalg::Scalar>(p: &Matrix<T>) -> Result<usize, SplittingError> {
    let n = p.require_square().map_err(SplittingError::from_linalg)?;
    let tr = p.trace().map_err(SplittingError::from_linalg)?;
    if !tr.is_zero() {
        return Err(SplittingError::NotTraceless(tr.to_string()));
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplittingReason {
    DiagonalizableRationalEigs,
    NotDiagonalizable,
    IrrationalEigenvalue,
    UnsupportedEigenvalueField,
}

impl fmt::Display for SplittingReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SplittingReason::DiagonalizableRationalEigs => "DiagonalizableRationalEigs",
            SplittingReason::NotDiagonalizable => "NotDiagonalizable",
            SplittingReason::IrrationalEigenvalue => "IrrationalEigenvalue",
            SplittingReason::UnsupportedEigenvalueField => "UnsupportedEigenvalueField",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingDecision {
    pub finite_splitting_exists: bool,
    pub reason: SplittingReason,
    /// `q` with `<S ∪ {1}> = (1/q)Z`, present iff a finite splitting exists.
    pub degree_lower_bound: Option<BigInt>,
}

/// Eigenvalue facts read off the minimal polynomial (same roots as the
/// characteristic polynomial, much cheaper for Kronecker powers).
struct MinpolyFacts {
    diagonalizable: bool,
    /// Distinct roots, if all rational.
    rational_roots: Option<Vec<Rational>>,
    has_high_degree_factor: bool,
}

fn minpoly_facts(p: &Matrix<Rational>) -> Result<MinpolyFacts, SplittingError> {
    let mp = linalg::minpoly(p).map_err(SplittingError::from_linalg)?;
    let f = factor(&mp).expect("monic minimal polynomial");
    let diagonalizable = f.factors.iter().all(|(_, e)| *e == 1);
    let all_linear = f.factors.iter().all(|(q, _)| q.degree() == Some(1));
    let rational_roots = all_linear.then(|| f.factors.iter().map(|(q, _)| -q.coeff(0)).collect());
    let has_high_degree_factor = f.factors.iter().any(|(q, _)| q.degree().unwrap_or(0) >= 3);
    Ok(MinpolyFacts { diagonalizable, rational_roots, has_high_degree_factor })
}

/// Finite splitting exists iff `P` is diagonalizable with rational eigenvalues.
pub fn decide_finite_splitting(p: &Matrix<Rational>) -> Result<SplittingDecision, SplittingError> {
    require_traceless(p)?;
    let facts = minpoly_facts(p)?;
    let (exists, reason) = if !facts.diagonalizable {
        (false, SplittingReason::NotDiagonalizable)
    } else if facts.rational_roots.is_some() {
        (true, SplittingReason::DiagonalizableRationalEigs)
    } else if facts.has_high_degree_factor {
        (false, SplittingReason::UnsupportedEigenvalueField)
    } else {
        (false, SplittingReason::IrrationalEigenvalue)
    };
    let degree_lower_bound = if exists {
        Some(lcm_denominators(facts.rational_roots.as_ref().expect("rational roots").iter()))
    } else {
        None
    };
    Ok(SplittingDecision { finite_splitting_exists: exists, reason, degree_lower_bound })
}

/// `P` is split over K itself iff diagonalizable with integer eigenvalues.
pub fn is_split_over_k(p: &Matrix<Rational>) -> Result<bool, SplittingError> {
    require_traceless(p)?;
    let facts = minpoly_facts(p)?;
    Ok(facts.diagonalizable
        && facts.rational_roots.is_some_and(|r| r.iter().all(|x| x.is_integer())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderStatus {
    Finite(BigInt),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderResult {
    pub status: OrderStatus,
    pub common_fractional_part: Option<Rational>,
}

/// Order of `(M_n(K), D_P)` in the tensor sense.
pub fn order(p: &Matrix<Rational>) -> Result<OrderResult, SplittingError> {
    let n = require_traceless(p)?;
    let facts = minpoly_facts(p)?;
    let infinite = OrderResult { status: OrderStatus::Infinite, common_fractional_part: None };
    if !facts.diagonalizable {
        return Ok(infinite);
    }
    let Some(roots) = facts.rational_roots else { return Ok(infinite) };
    let parts: Vec<Rational> = roots.iter().map(fractional_part).collect();
    if parts.windows(2).any(|w| w[0] != w[1]) {
        return Ok(infinite);
    }
    let part = parts.first().cloned().unwrap_or_else(Rational::zero);
    let m = part.denom().clone();
    assert!((BigInt::from(n) % &m).is_zero(), "order divides the matrix size");
    Ok(OrderResult { status: OrderStatus::Finite(m), common_fractional_part: Some(part) })
}

/// Matrix of the tensor product: the iterated Kronecker sum.
pub fn tensor_algebra<T: linalg::Scalar>(list: &[Matrix<T>]) -> Result<Matrix<T>, SplittingError> {
    if list.is_empty() {
        return Err(SplittingError::PreconditionFailed("empty list".into()));
    }
    for p in list {
        require_traceless(p)?;
    }
    Matrix::kron_sum_all(list).map_err(SplittingError::from_linalg)
}

/// `k`-fold tensor power.
pub fn tensor_power<T: linalg::Scalar>(p: &Matrix<T>, k: usize) -> Result<Matrix<T>, SplittingError> {
    if k == 0 {
        return Err(SplittingError::PreconditionFailed("power must be positive".into()));
    }
    tensor_algebra(&vec![p.clone(); k])
}

/// Degree `q` of the splitting field of `diag(l1, -l1) ⊕ diag(l2, -l2)`.
///
/// With `L = lcm(q1, q2)` this is `L/2` when both denominators have the same
/// positive 2-adic valuation and `L` otherwise: the eigenvalues `±l1 ± l2`
/// lose exactly one factor of 2 in that case and nothing else.
pub fn kronecker_pair_degree(l1: &Rational, l2: &Rational) -> BigInt {
    use num_integer::Integer;
    let (q1, q2) = (l1.denom(), l2.denom());
    let l = q1.lcm(q2);
    let v1 = q1.trailing_zeros().unwrap_or(0);
    let v2 = q2.trailing_zeros().unwrap_or(0);
    if v1 == v2 && v1 >= 1 {
        l / 2
    } else {
        l
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrdegValue {
    Exact(usize),
    /// A characteristic factor of degree at least 3 blocks an exact answer.
    Unsupported { lower_bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrdegResult {
    pub value: TrdegValue,
    /// `dim_Q span(S ∪ {1})`, reported for `m = 1`.
    pub k: Option<usize>,
}

/// Coordinates of eigenvalues over the basis `1, sqrt(d_1), sqrt(d_2), ...`.
fn surd_coordinates(rational: &[Rational], quad: &[QuadraticNumber], with_one: bool) -> Matrix<Rational> {
    let mut surds: Vec<BigInt> = quad.iter().map(|q| q.surd.clone()).collect();
    surds.sort();
    surds.dedup();
    let width = 1 + surds.len();
    let mut rows = Vec::new();
    if with_one {
        let mut r = vec![Rational::zero(); width];
        r[0] = Rational::one();
        rows.push(r);
    }
    for x in rational {
        let mut r = vec![Rational::zero(); width];
        r[0] = x.clone();
        rows.push(r);
    }
    for q in quad {
        let mut r = vec![Rational::zero(); width];
        r[0] = q.rational_part.clone();
        let idx = surds.iter().position(|d| *d == q.surd).expect("collected");
        r[1 + idx] = q.surd_coeff.clone();
        rows.push(r);
    }
    if rows.is_empty() {
        return Matrix::zeros(0, width);
    }
    Matrix::from_rows(rows).expect("rectangular")
}

/// Minimal transcendence degree of a splitting field.
pub fn min_trdeg(p: &Matrix<Rational>, spec: &DerivationSpec) -> Result<TrdegResult, SplittingError> {
    p.require_square().map_err(SplittingError::from_linalg)?;
    let ed = linalg::quadratic_eigendata(p).map_err(SplittingError::from_linalg)?;
    let rational: Vec<Rational> = ed.rational_eigs.iter().map(|(l, _)| l.clone()).collect();
    let quad: Vec<QuadraticNumber> = ed.quad_eigs.iter().map(|(q, _)| q.clone()).collect();
    if spec.m() == 1 {
        let k = surd_coordinates(&rational, &quad, true).rank();
        let bound = if ed.diagonalizable { k - 1 } else { k };
        let value = if ed.is_supported() {
            TrdegValue::Exact(bound)
        } else {
            TrdegValue::Unsupported { lower_bound: bound }
        };
        Ok(TrdegResult { value, k: ed.is_supported().then_some(k) })
    } else {
        let rank = surd_coordinates(&rational, &quad, false).rank();
        let value = if ed.is_supported() {
            TrdegValue::Exact(rank)
        } else {
            TrdegValue::Unsupported { lower_bound: rank }
        };
        Ok(TrdegResult { value, k: None })
    }
}

/// `H^{-1} δ(H) + H^{-1} Q H`.
pub fn gauge_transform(
    spec: &DerivationSpec,
    h: &Matrix<RatFunc>,
    q: &Matrix<RatFunc>,
) -> Result<Matrix<RatFunc>, SplittingError> {
    h.require_square().map_err(SplittingError::from_linalg)?;
    if h.shape() != q.shape() {
        return Err(SplittingError::ShapeMismatch(h.shape(), q.shape()));
    }
    let hinv = h.inverse().map_err(|_| SplittingError::SingularH)?;
    let dh = h.map(|x| spec.apply(x));
    Ok(&(&hinv * &dh) + &(&(&hinv * q) * h))
}

/// Converts a rational matrix to one over K.
pub fn to_k(p: &Matrix<Rational>) -> Matrix<RatFunc> {
    p.map(|x| RatFunc::constant(x.clone()))
}

/// The matrix over Q, if every entry is constant.
pub fn constant_part(p: &Matrix<RatFunc>) -> Option<Matrix<Rational>> {
    let entries: Option<Vec<Rational>> = p.data().iter().map(RatFunc::as_constant).collect();
    Some(Matrix::new(p.rows(), p.cols(), entries?).expect("same shape"))
}

/// Entries as polynomials, if all are polynomial.
pub(crate) fn polynomial_entries(p: &Matrix<RatFunc>) -> Option<Vec<Vec<Poly>>> {
    (0..p.rows())
        .map(|i| (0..p.cols()).map(|j| p.get(i, j).as_poly().cloned()).collect())
        .collect()
}
