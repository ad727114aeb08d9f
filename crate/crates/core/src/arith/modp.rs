//! Dense polynomials over a small prime field, used for modular factorization.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

pub(crate) type PolyP = Vec<u64>;

pub(crate) fn trim(mut a: PolyP) -> PolyP {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn reduce(coeffs: &[BigInt], p: u64) -> PolyP {
    let pb = BigInt::from(p);
    trim(coeffs.iter().map(|c| c.mod_floor(&pb).to_u64().expect("reduced")).collect())
}

fn deg(a: &PolyP) -> Option<usize> {
    a.len().checked_sub(1)
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

pub(crate) fn add(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)) % p).collect())
}

pub(crate) fn sub(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).unwrap_or(&0) + p - b.get(i).unwrap_or(&0)) % p).collect())
}

pub(crate) fn mul(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

pub(crate) fn scale(a: &PolyP, c: u64, p: u64) -> PolyP {
    trim(a.iter().map(|&x| x * c % p).collect())
}

pub(crate) fn monic(a: &PolyP, p: u64) -> PolyP {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => scale(a, inv_mod(lc, p), p),
    }
}

pub(crate) fn div_rem(a: &PolyP, b: &PolyP, p: u64) -> (PolyP, PolyP) {
    let db = deg(b).expect("division by zero polynomial mod p");
    let Some(da) = deg(a) else {
        return (Vec::new(), Vec::new());
    };
    if da < db {
        return (Vec::new(), a.clone());
    }
    let lc_inv = inv_mod(b[db], p);
    let mut rem = a.clone();
    let mut quot = vec![0u64; da - db + 1];
    for k in (0..=da - db).rev() {
        let c = rem[k + db] * lc_inv % p;
        if c == 0 {
            continue;
        }
        for (j, &bc) in b.iter().enumerate() {
            rem[k + j] = (rem[k + j] + p - c * bc % p) % p;
        }
        quot[k] = c;
    }
    rem.truncate(db);
    (trim(quot), trim(rem))
}

pub(crate) fn rem(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    div_rem(a, b, p).1
}

pub(crate) fn gcd(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

/// Returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
pub(crate) fn xgcd(a: &PolyP, b: &PolyP, p: u64) -> (PolyP, PolyP, PolyP) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (PolyP, PolyP) = (vec![1], Vec::new());
    let (mut t0, mut t1): (PolyP, PolyP) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        let t = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let lc_inv = inv_mod(*r0.last().expect("gcd of zero polynomials"), p);
    (scale(&r0, lc_inv, p), scale(&s0, lc_inv, p), scale(&t0, lc_inv, p))
}

pub(crate) fn derivative(a: &PolyP, p: u64) -> PolyP {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| (i as u64 % p) * c % p).collect())
}

fn pow_mod_poly(base: &PolyP, e: &BigUint, modulus: &PolyP, p: u64) -> PolyP {
    let mut result: PolyP = vec![1];
    let mut b = rem(base, modulus, p);
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            result = rem(&mul(&result, &b, p), modulus, p);
        }
        if i + 1 < bits {
            b = rem(&mul(&b, &b, p), modulus, p);
        }
    }
    result
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &PolyP, p: u64) -> Vec<(PolyP, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x: PolyP = vec![0, 1];
    let mut h = x.clone();
    let pe = BigUint::from(p);
    let mut d = 1;
    while deg(&f).unwrap_or(0) >= 2 * d {
        h = pow_mod_poly(&h, &pe, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if g.len() > 1 {
            out.push((g.clone(), d));
            f = div_rem(&f, &g, p).0;
            h = rem(&h, &f, p);
        }
        d += 1;
    }
    if f.len() > 1 {
        let df = deg(&f).unwrap();
        out.push((f, df));
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting.
fn equal_degree<R: Rng>(f: &PolyP, d: usize, p: u64, rng: &mut R, out: &mut Vec<PolyP>) {
    let n = deg(f).unwrap();
    if n == d {
        out.push(f.clone());
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let a: PolyP = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() < 2 {
            continue;
        }
        let g = gcd(f, &a, p);
        let candidate = if g.len() > 1 {
            g
        } else {
            let b = sub(&pow_mod_poly(&a, &e, f, p), &vec![1], p);
            gcd(f, &b, p)
        };
        if candidate.len() > 1 && candidate.len() < f.len() {
            let other = div_rem(f, &candidate, p).0;
            equal_degree(&candidate, d, p, rng, out);
            equal_degree(&other, d, p, rng, out);
            return;
        }
    }
}

/// Monic irreducible factors of a monic squarefree polynomial over F_p (p odd).
pub(crate) fn factor_squarefree<R: Rng>(f: &PolyP, p: u64, rng: &mut R) -> Vec<PolyP> {
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f, p) {
        equal_degree(&g, d, p, rng, &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Number of irreducible factors, from the distinct-degree split alone.
pub(crate) fn count_factors(f: &PolyP, p: u64) -> usize {
    distinct_degree(f, p).iter().map(|(g, d)| deg(g).unwrap() / d).sum()
}

pub(crate) fn is_squarefree(f: &PolyP, p: u64) -> bool {
    gcd(f, &derivative(f, p), p).len() == 1
}

pub(crate) fn to_bigint(a: &PolyP) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

pub(crate) fn is_zero(a: &PolyP) -> bool {
    a.iter().all(Zero::is_zero)
}
