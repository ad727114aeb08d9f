//! Integer row lattices: Hermite normal form, unimodular transforms, and
//! saturated kernels with a complement.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn combine(a: &[BigInt], x: &BigInt, b: &[BigInt], y: &BigInt) -> Vec<BigInt> {
    a.iter().zip(b).map(|(p, q)| x * p + y * q).collect()
}

/// Row-style Hermite normal form with the unimodular transform.
///
/// Returns `(h, u)` with `u * a = h`, `u` unimodular. Nonzero rows of `h`
/// come first, pivots are positive and entries above a pivot lie in
/// `[0, pivot)`.
pub fn hnf_with_transform(a: &IntMatrix, cols: usize) -> (IntMatrix, IntMatrix) {
    let m = a.len();
    let mut h = a.clone();
    let mut u = identity(m);
    let mut r = 0;
    for col in 0..cols {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if h[i][col].is_zero() {
                continue;
            }
            if h[r][col].is_zero() {
                h.swap(r, i);
                u.swap(r, i);
                continue;
            }
            let eg = h[r][col].extended_gcd(&h[i][col]);
            let a1 = &h[r][col] / &eg.gcd;
            let b1 = -(&h[i][col] / &eg.gcd);
            let hr = combine(&h[r], &eg.x, &h[i], &eg.y);
            let hi = combine(&h[r], &b1, &h[i], &a1);
            let ur = combine(&u[r], &eg.x, &u[i], &eg.y);
            let ui = combine(&u[r], &b1, &u[i], &a1);
            h[r] = hr;
            h[i] = hi;
            u[r] = ur;
            u[i] = ui;
        }
        if h[r][col].is_zero() {
            continue;
        }
        if h[r][col].is_negative() {
            h[r].iter_mut().for_each(|c| *c = -&*c);
            u[r].iter_mut().for_each(|c| *c = -&*c);
        }
        for i in 0..r {
            let q = h[i][col].div_floor(&h[r][col]);
            if !q.is_zero() {
                let neg = -q;
                h[i] = combine(&h[i], &BigInt::one(), &h[r], &neg);
                u[i] = combine(&u[i], &BigInt::one(), &u[r], &neg);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Nonzero rows of the Hermite normal form: a canonical basis of the row lattice.
pub fn hnf(a: &IntMatrix, cols: usize) -> IntMatrix {
    let (h, _) = hnf_with_transform(a, cols);
    h.into_iter().filter(|row| row.iter().any(|c| !c.is_zero())).collect()
}

/// Splits `Z^k` (with `k = a.len()`) into the saturated lattice
/// `{z : z * a = 0}` and a complement.
///
/// Both parts are returned in a canonical form: the kernel basis is in
/// Hermite normal form, the complement is in Hermite normal form and then
/// reduced modulo the kernel.
pub fn kernel_and_complement(a: &IntMatrix, cols: usize) -> (IntMatrix, IntMatrix) {
    let k = a.len();
    let (h, u) = hnf_with_transform(a, cols);
    let mut kernel = Vec::new();
    let mut complement = Vec::new();
    for (row, urow) in h.iter().zip(u) {
        if row.iter().all(Zero::is_zero) {
            kernel.push(urow);
        } else {
            complement.push(urow);
        }
    }
    let kernel = hnf(&kernel, k);
    let mut complement = hnf(&complement, k);
    for row in complement.iter_mut() {
        for krow in &kernel {
            let Some(piv) = krow.iter().position(|c| !c.is_zero()) else { continue };
            let q = row[piv].div_floor(&krow[piv]);
            if !q.is_zero() {
                *row = combine(row, &BigInt::one(), krow, &-q);
            }
        }
    }
    (kernel, complement)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}
