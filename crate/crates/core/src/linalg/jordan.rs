use num_traits::{One, Zero};

use super::{rational_eigenvalues, LinalgError, Matrix};
use crate::arith::Rational;

/// `R^{-1} M R = J` with `J` block diagonal; each block has the eigenvalue
/// on the diagonal and ones on the superdiagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanData {
    pub transform: Matrix<Rational>,
    pub blocks: Vec<(Rational, usize)>,
}

impl JordanData {
    pub fn jordan_matrix(&self) -> Matrix<Rational> {
        let n: usize = self.blocks.iter().map(|(_, s)| s).sum();
        let mut j = Matrix::zeros(n, n);
        let mut at = 0;
        for (lambda, size) in &self.blocks {
            for k in 0..*size {
                j.set(at + k, at + k, lambda.clone());
                if k + 1 < *size {
                    j.set(at + k, at + k + 1, Rational::one());
                }
            }
            at += size;
        }
        j
    }
}

fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).expect("equal lengths").rank()
}

/// Jordan form over Q; requires every eigenvalue to be rational.
///
/// Blocks are ordered by decreasing eigenvalue, then decreasing size.
pub fn jordan_form_rational(m: &Matrix<Rational>) -> Result<JordanData, LinalgError> {
    let n = m.require_square()?;
    let eigs = rational_eigenvalues(m)?.ok_or(LinalgError::NotAllRational)?;
    let mut columns: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for (lambda, mult) in eigs {
        let nil = m.try_sub(&Matrix::identity(n).scale(&lambda))?;
        // kernels[j] = basis of ker N^j
        let mut kernels = vec![Vec::new()];
        let mut power = Matrix::identity(n);
        while kernels.last().map_or(0, Vec::len) < mult {
            power = power.try_mul(&nil)?;
            kernels.push(power.nullspace());
        }
        let top = kernels.len() - 1;
        let mut chains: Vec<(usize, Vec<Rational>)> = Vec::new();
        for j in (1..=top).rev() {
            let mut span = kernels[j - 1].clone();
            for (len, v) in &chains {
                let mut x = v.clone();
                for _ in 0..len - j {
                    x = nil.mul_vec(&x);
                }
                span.push(x);
            }
            let mut r = rank_of(&span);
            for x in &kernels[j] {
                span.push(x.clone());
                let r2 = rank_of(&span);
                if r2 > r {
                    r = r2;
                    chains.push((j, x.clone()));
                } else {
                    span.pop();
                }
            }
        }
        for (len, v) in chains {
            let mut chain = vec![v];
            for _ in 1..len {
                let next = nil.mul_vec(chain.last().expect("nonempty"));
                chain.push(next);
            }
            chain.reverse();
            columns.extend(chain);
            blocks.push((lambda.clone(), len));
        }
    }
    let transform = Matrix::from_columns(&columns)?;
    debug_assert!(!transform.determinant()?.is_zero());
    Ok(JordanData { transform, blocks })
}
