//! Squarefree decomposition and complete factorization over Q.
//!
//! Irreducible factorization follows the classical modular route: pick a
//! small prime keeping the squarefree part squarefree, factor modulo the
//! prime (distinct-degree plus Cantor-Zassenhaus), Hensel-lift to a power
//! exceeding twice the Mignotte bound, then recombine lifted factors by
//! exhaustive subset trial division.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modp::{self, PolyP};
use super::{ArithError, Poly, Rational};

/// `unit * prod(p_i ^ e_i)` with monic, irreducible, pairwise distinct `p_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct FactoredPolynomial {
    pub unit: Rational,
    pub factors: Vec<(Poly, usize)>,
}

impl FactoredPolynomial {
    pub fn expand(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit.clone()), |acc, (p, e)| &acc * &p.pow(*e as u32))
    }

    /// Roots of the linear factors with their multiplicities.
    pub fn rational_roots(&self) -> Vec<(Rational, usize)> {
        self.factors
            .iter()
            .filter(|(p, _)| p.degree() == Some(1))
            .map(|(p, e)| (-p.coeff(0), *e))
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

impl fmt::Debug for FactoredPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.unit)?;
        for (p, e) in &self.factors {
            write!(f, " * ({p})^{e}")?;
        }
        Ok(())
    }
}

/// Yun's squarefree decomposition of a nonzero polynomial.
///
/// Returns monic, pairwise coprime, squarefree parts with their
/// multiplicities; the unit `p.leading_coeff()` is left out.
pub fn squarefree_factor(p: &Poly) -> Result<Vec<(Poly, usize)>, ArithError> {
    if p.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let a = p.monic();
    if a.is_constant() {
        return Ok(Vec::new());
    }
    let b = a.derivative();
    let c = Poly::gcd(&a, &b);
    let mut w = a.div_exact(&c);
    let mut y = b.div_exact(&c);
    let mut z = &y - &w.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while !w.is_constant() {
        let g = Poly::gcd(&w, &z);
        if !g.is_constant() {
            out.push((g.clone(), i));
        }
        w = w.div_exact(&g);
        y = z.div_exact(&g);
        z = &y - &w.derivative();
        i += 1;
    }
    Ok(out)
}

/// Complete factorization into monic irreducibles over Q.
pub fn factor(p: &Poly) -> Result<FactoredPolynomial, ArithError> {
    if p.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let mut factors = Vec::new();
    for (part, mult) in squarefree_factor(p)? {
        for q in factor_squarefree(&part) {
            factors.push((q, mult));
        }
    }
    factors.sort();
    Ok(FactoredPolynomial { unit: p.leading_coeff(), factors })
}

/// Factors a monic squarefree polynomial over Q.
fn factor_squarefree(f: &Poly) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let v = f.t_adic_valuation();
    if v > 0 {
        out.push(Poly::t());
        f = f.div_exact(&Poly::t());
    }
    if f.degree().unwrap_or(0) >= 1 {
        let (_, prim) = f.primitive_integer();
        for g in zassenhaus(&prim) {
            out.push(Poly::from_bigints(&g).monic());
        }
    }
    out
}

const SMALL_PRIMES: [u64; 40] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179,
];

/// Factors a primitive squarefree integer polynomial (positive leading coefficient)
/// into primitive irreducible integer polynomials.
fn zassenhaus(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let lc = f[n].clone();

    // Try a handful of admissible primes and keep the one with fewest factors.
    let mut best: Option<(u64, usize)> = None;
    let mut tried = 0;
    for &p in SMALL_PRIMES.iter() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = modp::reduce(f, p);
        if fp.len() != n + 1 || !modp::is_squarefree(&modp::monic(&fp, p), p) {
            continue;
        }
        let count = modp::count_factors(&modp::monic(&fp, p), p);
        if best.is_none_or(|(_, c)| count < c) {
            best = Some((p, count));
        }
        tried += 1;
        if count == 1 || tried >= 5 {
            break;
        }
    }
    let (p, count) = match best {
        Some(b) => b,
        None => large_prime_fallback(f),
    };
    if count == 1 {
        return vec![f.to_vec()];
    }

    let fp = modp::monic(&modp::reduce(f, p), p);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let modular = modp::factor_squarefree(&fp, p, &mut rng);

    // Mignotte-style bound on coefficients of lc * (any factor).
    let norm2: BigInt = f.iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound = (BigInt::one() << n) * norm2 * lc.abs();
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut modulus = pb.clone();
    while modulus <= &bound * 2 {
        modulus *= &pb;
        k += 1;
    }
    let lifted = hensel_lift(f, &modular, p, k);
    recombine(f, lifted, &modulus)
}

/// Used only when none of the small primes is admissible; searches further.
fn large_prime_fallback(f: &[BigInt]) -> (u64, usize) {
    let n = f.len() - 1;
    let lc = &f[n];
    let mut p = 181u64;
    loop {
        p += 2;
        if !is_prime(p) || (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = modp::reduce(f, p);
        if fp.len() == n + 1 && modp::is_squarefree(&modp::monic(&fp, p), p) {
            return (p, modp::count_factors(&modp::monic(&fp, p), p));
        }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn zmod(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    a.iter().map(|c| c.mod_floor(m)).collect()
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn zsub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()
        })
        .collect()
}

fn zadd_scaled(a: &mut Vec<BigInt>, b: &PolyP, scale: &BigInt) {
    if a.len() < b.len() {
        a.resize(b.len(), BigInt::zero());
    }
    for (i, &c) in b.iter().enumerate() {
        a[i] += scale * BigInt::from(c);
    }
}

/// Lifts `f = lc * prod(factors) mod p` to monic factors modulo `p^k`.
fn hensel_lift(f: &[BigInt], factors: &[PolyP], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let pk = BigInt::from(p).pow(k);
    let lc_p = modp::reduce(&[f[f.len() - 1].clone()], p)[0];
    let mut current = zmod(f, &pk);
    let mut out = Vec::with_capacity(factors.len());
    for i in 0..factors.len() - 1 {
        let g0 = &factors[i];
        let h0 = factors[i + 1..]
            .iter()
            .fold(vec![lc_p], |acc, q| modp::mul(&acc, q, p));
        let (g, h) = lift_pair(&current, g0, &h0, p, k);
        out.push(g);
        current = h;
    }
    // The remaining cofactor is lc * g_last; strip the leading coefficient.
    let lc = current.last().cloned().expect("nonzero cofactor");
    let lc_inv = lc.modinv(&pk).expect("leading coefficient invertible mod p^k");
    out.push(zmod(&current.iter().map(|c| c * &lc_inv).collect::<Vec<_>>(), &pk));
    out
}

/// Linear Hensel lifting of `f = g0 * h0 (mod p)` with `g0` monic.
fn lift_pair(f: &[BigInt], g0: &PolyP, h0: &PolyP, p: u64, k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let (one, s, t) = modp::xgcd(g0, h0, p);
    debug_assert_eq!(one, vec![1]);
    let pb = BigInt::from(p);
    let mut g = modp::to_bigint(g0);
    let mut h = modp::to_bigint(h0);
    let top = h.len() - 1;
    h[top] = f[f.len() - 1].clone();
    let mut pj = pb.clone();
    for _ in 1..k {
        let pj1 = &pj * &pb;
        let err = zmod(&zsub(f, &zmul(&g, &h)), &pj1);
        let e: Vec<BigInt> = err.iter().map(|c| c / &pj).collect();
        let e = modp::reduce(&e, p);
        if !modp::is_zero(&e) {
            let te = modp::mul(&t, &e, p);
            let (q, dg) = modp::div_rem(&te, g0, p);
            let dh = modp::add(&modp::mul(&s, &e, p), &modp::mul(&q, h0, p), p);
            zadd_scaled(&mut g, &dg, &pj);
            zadd_scaled(&mut h, &dh, &pj);
        }
        pj = pj1;
    }
    (zmod(&g, &pj), zmod(&h, &pj))
}

fn symmetric(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    a.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

fn primitive(a: &[BigInt]) -> Vec<BigInt> {
    let mut a = a.to_vec();
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    let mut g = a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if a.last().is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn recombine(f: &[BigInt], mut lifted: Vec<Vec<BigInt>>, modulus: &BigInt) -> Vec<Vec<BigInt>> {
    let mut result = Vec::new();
    let mut f = Poly::from_bigints(f);
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = None;
        for subset in subsets(lifted.len(), size) {
            let lc = f.primitive_integer().1.last().cloned().expect("nonzero");
            let product = subset
                .iter()
                .fold(vec![lc], |acc, &i| zmod(&zmul(&acc, &lifted[i]), modulus));
            let candidate = primitive(&symmetric(&product, modulus));
            let cand_poly = Poly::from_bigints(&candidate);
            let (q, r) = f.div_rem(&cand_poly).expect("nonzero candidate");
            if r.is_zero() {
                found = Some((subset, candidate, q));
                break;
            }
        }
        match found {
            Some((subset, candidate, q)) => {
                result.push(candidate);
                f = q;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
            }
            None => size += 1,
        }
    }
    let (_, rest) = f.primitive_integer();
    if rest.len() > 1 {
        result.push(rest);
    }
    result
}
