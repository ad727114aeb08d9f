//! Independent oracles and corpus generators shared by the integration tests.
//!
//! The oracles avoid the library's eigen machinery: characteristic polynomials
//! come from Faddeev-LeVerrier, rational roots from the rational root theorem,
//! and diagonalizability from evaluating the squarefree part at the matrix.
#![allow(dead_code)]

use diffsplit::arith::{Poly, RatFunc, Rational};
use diffsplit::linalg::Matrix;
use diffsplit::splitting::SplittingReason;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

// ---- dense polynomials over Q, low degree first ----

pub fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn pdivrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![Q::zero(); r.len() - b.len() + 1];
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().expect("nonempty") / &lead;
        for (i, y) in b.iter().enumerate() {
            r[i + shift] -= &c * y;
        }
        quo[shift] = c;
        r = trim(r);
    }
    (trim(quo), r)
}

pub fn pgcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = pdivrem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().cloned() {
        a.iter_mut().for_each(|c| *c = &*c / &l);
    }
    a
}

pub fn pderiv(a: &[Q]) -> Vec<Q> {
    trim(a.iter().enumerate().skip(1).map(|(i, c)| c * qi(i as i64)).collect())
}

pub fn peval(a: &[Q], x: &Q) -> Q {
    a.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

/// `p(M)` by Horner.
pub fn peval_matrix(p: &[Q], m: &Matrix<Q>) -> Matrix<Q> {
    let n = m.rows();
    let mut acc = Matrix::zeros(n, n);
    for c in p.iter().rev() {
        acc = &(&acc * m) + &Matrix::identity(n).scale(c);
    }
    acc
}

/// Faddeev-LeVerrier: `det(xI - A)`, low degree first.
pub fn charpoly_fl(a: &Matrix<Q>) -> Vec<Q> {
    let n = a.rows();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m = Matrix::<Q>::zeros(n, n);
    for k in 1..=n {
        m = &(a * &m) + &Matrix::identity(n).scale(&coeffs[n - k + 1]);
        let am = a * &m;
        coeffs[n - k] = -am.trace().unwrap() / qi(k as i64);
    }
    coeffs
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out
}

/// Rational roots with multiplicity and the cofactor without rational roots.
pub fn rational_roots(p: &[Q]) -> (Vec<(Q, usize)>, Vec<Q>) {
    let mut rest = trim(p.to_vec());
    let mut roots = Vec::new();
    let mut zero_mult = 0;
    while rest.len() > 1 && rest[0].is_zero() {
        rest.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Q::zero(), zero_mult));
    }
    if rest.len() <= 1 {
        return (roots, rest);
    }
    let den = rest.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = rest.iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect();
    let mut cands = Vec::new();
    for a in divisors(&ints[0]) {
        for b in divisors(ints.last().unwrap()) {
            let r = Q::new(a.clone(), b.clone());
            cands.push(r.clone());
            cands.push(-r);
        }
    }
    cands.sort();
    cands.dedup();
    for r in cands {
        let mut mult = 0;
        while rest.len() > 1 && peval(&rest, &r).is_zero() {
            rest = pdivrem(&rest, &[-r.clone(), Q::one()]).0;
            mult += 1;
        }
        if mult > 0 {
            roots.push((r, mult));
        }
    }
    (roots, rest)
}

/// Diagonalizable over an algebraic closure iff the squarefree part of the
/// characteristic polynomial annihilates the matrix.
pub fn diagonalizable_oracle(a: &Matrix<Q>) -> bool {
    let cp = charpoly_fl(a);
    let g = pgcd(&cp, &pderiv(&cp));
    let (sqfree, _) = pdivrem(&cp, &g);
    peval_matrix(&sqfree, a).is_zero()
}

pub fn is_square_rational(x: &Q) -> bool {
    if x.is_negative() {
        return false;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    &n * &n == *x.numer() && &d * &d == *x.denom()
}

// ---- block-structured corpus ----

#[derive(Debug, Clone)]
pub enum Block {
    Scalar(Q),
    Jordan(Q, usize),
    /// `[[a, d], [1, a]]`, eigenvalues `a ± sqrt(d)`.
    Quad(Q, i64),
    /// Companion of `x^3 + p x + r` shifted by `a`.
    Cubic(Q, i64, i64),
    /// `[[C, I], [0, C]]` with `C` a `Quad` block.
    QuadJordan(Q, i64),
}

impl Block {
    pub fn size(&self) -> usize {
        match self {
            Block::Scalar(_) => 1,
            Block::Jordan(_, k) => *k,
            Block::Quad(..) => 2,
            Block::Cubic(..) => 3,
            Block::QuadJordan(..) => 4,
        }
    }

    fn matrix(&self) -> Matrix<Q> {
        match self {
            Block::Scalar(l) => Matrix::diagonal(vec![l.clone()]),
            Block::Jordan(l, k) => {
                let mut m = Matrix::identity(*k).scale(l);
                for i in 0..k - 1 {
                    m.set(i, i + 1, Q::one());
                }
                m
            }
            Block::Quad(a, d) => {
                Matrix::from_rows(vec![vec![a.clone(), qi(*d)], vec![Q::one(), a.clone()]]).unwrap()
            }
            Block::Cubic(a, p, r) => {
                let c = Matrix::from_rows(vec![
                    vec![Q::zero(), Q::zero(), qi(-r)],
                    vec![Q::one(), Q::zero(), qi(-p)],
                    vec![Q::zero(), Q::one(), Q::zero()],
                ])
                .unwrap();
                &c + &Matrix::identity(3).scale(a)
            }
            Block::QuadJordan(a, d) => {
                let mut m = Matrix::zeros(4, 4);
                for (i, j) in [(0, 0), (2, 2)] {
                    m.set(i, j, a.clone());
                    m.set(i, j + 1, qi(*d));
                    m.set(i + 1, j, Q::one());
                    m.set(i + 1, j + 1, a.clone());
                }
                m.set(0, 2, Q::one());
                m.set(1, 3, Q::one());
                m
            }
        }
    }

    /// Characteristic polynomial factors, each with its multiplicity.
    fn char_factors(&self) -> Vec<(Vec<Q>, usize)> {
        match self {
            Block::Scalar(l) => vec![(vec![-l.clone(), Q::one()], 1)],
            Block::Jordan(l, k) => vec![(vec![-l.clone(), Q::one()], *k)],
            Block::Quad(a, d) | Block::QuadJordan(a, d) => {
                // (x - a)^2 - d
                let f = vec![a * a - qi(*d), -(a * qi(2)), Q::one()];
                vec![(f, if matches!(self, Block::Quad(..)) { 1 } else { 2 })]
            }
            Block::Cubic(a, p, r) => {
                // (x - a)^3 + p (x - a) + r
                let xa = vec![-a.clone(), Q::one()];
                let cube = pmul(&pmul(&xa, &xa), &xa);
                let lin = pmul(&xa, &[qi(*p)]);
                let mut f = cube;
                for (i, c) in lin.iter().enumerate() {
                    f[i] += c;
                }
                f[0] += qi(*r);
                vec![(f, 1)]
            }
        }
    }

    fn shifted(&self, s: &Q) -> Block {
        match self {
            Block::Scalar(l) => Block::Scalar(l + s),
            Block::Jordan(l, k) => Block::Jordan(l + s, *k),
            Block::Quad(a, d) => Block::Quad(a + s, *d),
            Block::Cubic(a, p, r) => Block::Cubic(a + s, *p, *r),
            Block::QuadJordan(a, d) => Block::QuadJordan(a + s, *d),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Case {
    pub p: Matrix<Q>,
    /// Blocks after the traceless shift.
    pub blocks: Vec<Block>,
}

pub fn block_diag(blocks: &[Block]) -> Matrix<Q> {
    let n: usize = blocks.iter().map(Block::size).sum();
    let mut m = Matrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        let bm = b.matrix();
        for i in 0..b.size() {
            for j in 0..b.size() {
                m.set(at + i, at + j, bm.get(i, j).clone());
            }
        }
        at += b.size();
    }
    m
}

/// Random unimodular integer matrix from elementary row operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Q> {
    let mut s = Matrix::<Q>::identity(n);
    if n < 2 {
        return s;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = qi(rng.gen_range(-2..=2));
        for k in 0..n {
            let v = s.get(i, k) + &(&c * s.get(j, k));
            s.set(i, k, v);
        }
    }
    s
}

/// `S B S^{-1}` shifted to trace zero.
pub fn make_case(rng: &mut ChaCha8Rng, blocks: Vec<Block>) -> Case {
    let n: usize = blocks.iter().map(Block::size).sum();
    let b = block_diag(&blocks);
    let s = -(b.trace().unwrap() / qi(n as i64));
    let blocks: Vec<Block> = blocks.iter().map(|bl| bl.shifted(&s)).collect();
    let b = block_diag(&blocks);
    let sm = random_unimodular(rng, n);
    let p = &(&sm * &b) * &sm.inverse().unwrap();
    Case { p, blocks }
}

pub fn conjugate_case(rng: &mut ChaCha8Rng, blocks: Vec<Block>) -> Case {
    make_case(rng, blocks)
}

fn small_rational(rng: &mut ChaCha8Rng, max_den: i64) -> Q {
    let d = rng.gen_range(1..=max_den);
    Q::new(rng.gen_range(-2 * d..=2 * d).into(), d.into())
}

const NON_SQUARES: [i64; 8] = [2, 3, 5, 6, -1, -2, -3, 7];
const CUBICS: [(i64, i64); 3] = [(-1, -1), (0, -2), (-3, 1)];

/// A random block of size at most `room`.
pub fn random_block(rng: &mut ChaCha8Rng, room: usize, allow_cubic: bool) -> Block {
    loop {
        let kind = rng.gen_range(0..10);
        let b = match kind {
            0..=3 => Block::Scalar(small_rational(rng, 4)),
            4 | 5 => Block::Jordan(small_rational(rng, 3), rng.gen_range(2..=3)),
            6 | 7 => Block::Quad(small_rational(rng, 3), NON_SQUARES[rng.gen_range(0..NON_SQUARES.len())]),
            8 if allow_cubic => {
                let (p, r) = CUBICS[rng.gen_range(0..CUBICS.len())];
                Block::Cubic(small_rational(rng, 2), p, r)
            }
            _ => Block::QuadJordan(small_rational(rng, 2), NON_SQUARES[rng.gen_range(0..NON_SQUARES.len())]),
        };
        if b.size() <= room {
            return b;
        }
    }
}

pub fn random_case(rng: &mut ChaCha8Rng, n: usize, allow_cubic: bool) -> Case {
    let mut blocks = Vec::new();
    let mut room = n;
    while room > 0 {
        let b = random_block(rng, room, allow_cubic);
        room -= b.size();
        blocks.push(b);
    }
    make_case(rng, blocks)
}

/// Random diagonalizable case with rational eigenvalues.
pub fn random_rational_diag_case(rng: &mut ChaCha8Rng, n: usize, max_den: i64) -> Case {
    let blocks = (0..n).map(|_| Block::Scalar(small_rational(rng, max_den))).collect();
    make_case(rng, blocks)
}

/// Ground truth for the finite-splitting decision, checked against the
/// Faddeev-LeVerrier characteristic polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truth {
    pub reason: SplittingReason,
    pub q: Option<BigInt>,
    pub diagonalizable: bool,
    /// Rational eigenvalues with multiplicity when all are rational.
    pub rational_eigs: Option<Vec<Q>>,
}

pub fn truth(case: &Case) -> Result<Truth, String> {
    let cp = charpoly_fl(&case.p);
    let mut expected = vec![Q::one()];
    for b in &case.blocks {
        for (f, m) in b.char_factors() {
            for _ in 0..m {
                expected = pmul(&expected, &f);
            }
        }
    }
    if cp != expected {
        return Err(format!("charpoly mismatch for {}", case.p));
    }
    // irreducibility of the nonlinear factors
    for b in &case.blocks {
        for (f, _) in b.char_factors() {
            if f.len() > 2 && !rational_roots(&f).0.is_empty() {
                return Err("block factor has a rational root".into());
            }
        }
    }
    let has_jordan = case.blocks.iter().any(|b| matches!(b, Block::Jordan(..) | Block::QuadJordan(..)));
    let diagonalizable = diagonalizable_oracle(&case.p);
    if diagonalizable == has_jordan {
        return Err("diagonalizability oracle disagrees with block structure".into());
    }
    let (roots, rest) = rational_roots(&cp);
    let rest_deg = rest.len().saturating_sub(1);
    let has_cubic = case.blocks.iter().any(|b| matches!(b, Block::Cubic(..)));
    let reason = if !diagonalizable {
        SplittingReason::NotDiagonalizable
    } else if rest_deg == 0 {
        SplittingReason::DiagonalizableRationalEigs
    } else if has_cubic {
        SplittingReason::UnsupportedEigenvalueField
    } else {
        SplittingReason::IrrationalEigenvalue
    };
    let rational_eigs = (rest_deg == 0).then(|| {
        let mut v: Vec<Q> = roots.iter().flat_map(|(r, m)| std::iter::repeat_n(r.clone(), *m)).collect();
        v.sort();
        v
    });
    let q = (reason == SplittingReason::DiagonalizableRationalEigs).then(|| {
        rational_eigs.as_ref().unwrap().iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
    });
    Ok(Truth { reason, q, diagonalizable, rational_eigs })
}

/// The enumerated 300-case corpus: sizes 1 to 4, all block kinds.
pub fn decision_corpus(seed: u64) -> Vec<Case> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(300);
    for i in 0..300 {
        let n = 1 + i % 4;
        let case = if i % 5 == 0 {
            random_rational_diag_case(&mut rng, n, 6)
        } else {
            random_case(&mut rng, n, true)
        };
        out.push(case);
    }
    out
}

// ---- random elements of Q(t) ----

pub fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, height: i64) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    Poly::from_ints(&(0..=deg).map(|_| rng.gen_range(-height..=height)).collect::<Vec<_>>())
}

pub fn random_nonzero_poly(rng: &mut ChaCha8Rng, max_deg: usize, height: i64) -> Poly {
    loop {
        let p = random_poly(rng, max_deg, height);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn random_ratfunc(rng: &mut ChaCha8Rng, max_deg: usize, height: i64) -> RatFunc {
    RatFunc::new(random_poly(rng, max_deg, height), random_nonzero_poly(rng, max_deg, height)).unwrap()
}

pub fn height(f: &RatFunc) -> BigInt {
    // clear denominators so that numerator and denominator are coprime integer polynomials
    let l = f.num().coeffs().iter().chain(f.den().coeffs()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lq = Q::from_integer(l);
    let ints: Vec<BigInt> = f.num().coeffs().iter().chain(f.den().coeffs()).map(|c| (c * &lq).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.iter().map(|c| (c / &g).abs()).max().unwrap_or_else(BigInt::zero)
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("small")
}
