use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{
    membership_a, numerator_coords, pole_primes, solve_combination, DerivationSpec, DiffFieldError,
    PowerProduct,
};
use crate::arith::{lcm_denominators, Poly, RatFunc, Rational};
use crate::lattice::{self, IntMatrix};
use crate::linalg::Matrix;
use crate::tower::TowerElement;

/// Z-bases with `<S> = 𝒜_S ⊕ 𝒜_S'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SGroupDecomposition {
    pub spec: DerivationSpec,
    pub basis_s: Vec<RatFunc>,
    pub basis_as: Vec<RatFunc>,
    pub basis_as_prime: Vec<RatFunc>,
    pub rank_as_prime: usize,
}

fn to_integer_rows(rows: &[Vec<Rational>]) -> (IntMatrix, BigInt) {
    let d = lcm_denominators(rows.iter().flatten());
    let scale = Rational::from_integer(d.clone());
    let ints = rows.iter().map(|r| r.iter().map(|x| (x * &scale).to_integer()).collect()).collect();
    (ints, d)
}

fn combine(coeffs: &[BigInt], elems: &[RatFunc]) -> RatFunc {
    coeffs
        .iter()
        .zip(elems)
        .filter(|(c, _)| !c.is_zero())
        .fold(RatFunc::zero(), |acc, (c, e)| &acc + &e.scale(&Rational::from_integer(c.clone())))
}

/// Integer coordinates of `targets` over the Q-independent `basis`, if they exist.
fn integer_coordinates(basis: &[RatFunc], targets: &[RatFunc]) -> Option<Vec<Vec<BigInt>>> {
    let mut all = basis.to_vec();
    all.extend(targets.iter().cloned());
    let coords = numerator_coords(&all);
    let (b, t) = coords.split_at(basis.len());
    t.iter()
        .map(|target| {
            let x = solve_combination(b, target)?;
            let back = x.iter().zip(b).fold(vec![Rational::zero(); target.len()], |mut acc, (xi, bi)| {
                for (a, v) in acc.iter_mut().zip(bi) {
                    *a += xi * v;
                }
                acc
            });
            if back != *target || !x.iter().all(|r| r.is_integer()) {
                return None;
            }
            Some(x.into_iter().map(|r| r.to_integer()).collect())
        })
        .collect()
}

impl SGroupDecomposition {
    /// Re-checks the decomposition: the change of basis from `basis_s` to
    /// `basis_as ∪ basis_as_prime` is unimodular, elements of `basis_as` are
    /// in 𝒜, elements of `basis_as_prime` are not.
    pub fn verify(&self) -> bool {
        let mut joint = self.basis_as.clone();
        joint.extend(self.basis_as_prime.iter().cloned());
        if joint.len() != self.basis_s.len() || self.rank_as_prime != self.basis_as_prime.len() {
            return false;
        }
        let Some(t) = integer_coordinates(&self.basis_s, &joint) else { return false };
        if !lattice::determinant(&t).abs().is_one() {
            return false;
        }
        let in_a = |a: &RatFunc| membership_a(&self.spec, a).map(|m| m.is_member()).unwrap_or(false);
        self.basis_as.iter().all(in_a) && !self.basis_as_prime.iter().any(in_a)
    }

    /// Integer coordinates of each element over `basis_as ++ basis_as_prime`.
    pub fn coordinates(&self, elems: &[RatFunc]) -> Option<Vec<Vec<BigInt>>> {
        let mut joint = self.basis_as.clone();
        joint.extend(self.basis_as_prime.iter().cloned());
        integer_coordinates(&joint, elems)
    }
}

/// Computes `<S>`, `𝒜_S = <S> ∩ 𝒜` and a canonical complement.
pub fn group_decompose(spec: &DerivationSpec, s: &[RatFunc]) -> Result<SGroupDecomposition, DiffFieldError> {
    if s.is_empty() {
        return Err(DiffFieldError::EmptyS);
    }
    if let Some(i) = s.iter().position(Zero::is_zero) {
        return Err(DiffFieldError::ZeroElement(i));
    }
    let primes = pole_primes(s.iter().map(|a| a.den().clone()));
    let cands = spec.candidates(&primes);

    // Basis of <S>: S itself when Z-independent, otherwise the Hermite basis.
    let coords = numerator_coords(s);
    let (ints, _) = to_integer_rows(&coords);
    let cols = coords[0].len();
    let h = lattice::hnf(&ints, cols);
    let basis_s: Vec<RatFunc> = if h.len() == s.len() {
        s.to_vec()
    } else {
        let mut hs = Vec::new();
        for row in &h {
            // Each Hermite row is an integer combination of S; recover it.
            let x = solve_combination(
                &ints.iter().map(|r| r.iter().map(|c| Rational::from_integer(c.clone())).collect()).collect::<Vec<_>>(),
                &row.iter().map(|c| Rational::from_integer(c.clone())).collect::<Vec<_>>(),
            )
            .expect("row lies in the lattice span");
            let elem = x
                .iter()
                .zip(s)
                .fold(RatFunc::zero(), |acc, (xi, e)| &acc + &e.scale(xi));
            hs.push(elem);
        }
        hs
    };
    let k = basis_s.len();

    // z is in 𝒜_S iff (Σ z_i b_i) is orthogonal to the annihilator of the candidate span.
    let mut all = basis_s.clone();
    all.extend(cands.iter().cloned());
    let coords = numerator_coords(&all);
    let (b, c) = coords.split_at(k);
    let n = coords[0].len();
    let cmat = Matrix::new(c.len(), n, c.iter().flatten().cloned().collect()).expect("shape");
    let annihilator = cmat.nullspace();
    let bw: Vec<Vec<Rational>> = b
        .iter()
        .map(|row| {
            annihilator
                .iter()
                .map(|w| row.iter().zip(w).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
                .collect()
        })
        .collect();
    let (bw_int, _) = to_integer_rows(&bw);
    let (kernel, complement) = lattice::kernel_and_complement(&bw_int, annihilator.len());

    let basis_as: Vec<RatFunc> = kernel.iter().map(|z| combine(z, &basis_s)).collect();
    let basis_as_prime: Vec<RatFunc> = complement.iter().map(|z| combine(z, &basis_s)).collect();
    Ok(SGroupDecomposition {
        spec: spec.clone(),
        rank_as_prime: basis_as_prime.len(),
        basis_s,
        basis_as,
        basis_as_prime,
    })
}

/// `E = K(X{b'} : b' ∈ 𝒜_S')(v_i^(1/n_i))` with `w` optionally adjoined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingFieldDescription {
    pub radical_gens: Vec<(PowerProduct, BigInt)>,
    pub exp_gens: Vec<RatFunc>,
    pub has_w: bool,
    pub trdeg: usize,
    /// `[E : K(X{...})(w)]` for the radical part, computed as a lattice index.
    pub degree_bound: BigInt,
}

impl SplittingFieldDescription {
    /// `K` itself.
    pub fn base() -> Self {
        SplittingFieldDescription {
            radical_gens: Vec::new(),
            exp_gens: Vec::new(),
            has_w: false,
            trdeg: 0,
            degree_bound: BigInt::one(),
        }
    }

    /// Adds the formal `w` with `δw = 1`; raises the transcendence degree
    /// unless K already has such an element.
    pub fn with_w(mut self, spec: &DerivationSpec) -> Self {
        if !self.has_w {
            self.has_w = true;
            if spec.primitive_of_one().is_none() {
                self.trdeg += 1;
            }
        }
        self
    }

    /// The largest radical index.
    pub fn max_radical_index(&self) -> BigInt {
        self.radical_gens.iter().map(|(_, n)| n.clone()).max().unwrap_or_else(BigInt::one)
    }
}

/// `[Γ + Z^N : Z^N]` for rational exponent vectors `Γ` over the bases.
pub(crate) fn radical_index(vectors: &[Vec<Rational>]) -> BigInt {
    let Some(n) = vectors.first().map(Vec::len) else { return BigInt::one() };
    if n == 0 {
        return BigInt::one();
    }
    let (mut ints, d) = to_integer_rows(vectors);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[i] = d.clone();
        ints.push(row);
    }
    let h = lattice::hnf(&ints, n);
    let det = lattice::determinant(&h).abs();
    d.pow(n as u32) / det
}

/// Splitting field of `S` and a solution of `δy = a y` for each `a ∈ S`.
pub fn build_splitting_field(
    spec: &DerivationSpec,
    s: &[RatFunc],
) -> Result<(SplittingFieldDescription, Vec<(RatFunc, TowerElement)>), DiffFieldError> {
    let dec = group_decompose(spec, s)?;
    let mut radical_gens = Vec::new();
    let mut base_solutions = Vec::new();
    let mut bases: Vec<Poly> = Vec::new();
    let mut exps: Vec<Vec<(Poly, Rational)>> = Vec::new();
    for b in &dec.basis_as {
        let w = membership_a(spec, b)?.witness().cloned().ok_or(DiffFieldError::NotInA)?;
        if w.n_a > BigInt::one() {
            radical_gens.push((w.v.clone(), w.n_a.clone()));
        }
        for (p, _) in w.exponents() {
            if !bases.contains(&p) {
                bases.push(p);
            }
        }
        exps.push(w.exponents());
        base_solutions.push(w.solution());
    }
    for b in &dec.basis_as_prime {
        base_solutions.push(
            TowerElement::exp_gen(b, &Rational::one()).map_err(|e| DiffFieldError::BadInput(e.to_string()))?,
        );
    }
    let vectors: Vec<Vec<Rational>> = exps
        .iter()
        .map(|ex| {
            bases
                .iter()
                .map(|p| ex.iter().find(|(q, _)| q == p).map_or_else(Rational::zero, |(_, r)| r.clone()))
                .collect()
        })
        .collect();
    let desc = SplittingFieldDescription {
        radical_gens,
        exp_gens: dec.basis_as_prime.clone(),
        has_w: false,
        trdeg: dec.rank_as_prime,
        degree_bound: radical_index(&vectors),
    };
    let coords = dec.coordinates(s).expect("S lies in <S>");
    let mut solutions = Vec::with_capacity(s.len());
    for (a, z) in s.iter().zip(coords) {
        let y = z.iter().zip(&base_solutions).try_fold(TowerElement::one(), |acc, (k, u)| {
            Ok::<_, DiffFieldError>(&acc * &u.pow_signed(k).map_err(|e| DiffFieldError::BadInput(e.to_string()))?)
        })?;
        debug_assert_eq!(y.derive(spec), &y * &TowerElement::from_ratfunc(a.clone()));
        solutions.push((a.clone(), y));
    }
    Ok((desc, solutions))
}
