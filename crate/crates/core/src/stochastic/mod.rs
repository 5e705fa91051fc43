//! Stochastic matrix classes and the link between a contraction `L`,
//! its Schur-square `Q` and the diagonal of `L diag(η) Lᵀ`.

pub mod classify;
pub mod matrix;
pub mod pattern;

use thiserror::Error;

use crate::numerics::rational::Rational;
use crate::numerics::sequence::Sequence;
use crate::numerics::surd::Surd;

pub use classify::{classify, classify_certified, isometry_flags, ClassifyError, OrthogonalWitness, StochasticClass};
pub use matrix::{surd_schur_square, AnyMatrix, DenseMatrix, Entry, MatrixError, Scalar};
pub use pattern::{
    block_extend, block_extend_orthogonal, pattern_next_column, pattern_orthostochastic, pattern_window,
    rational_unit_vector, spread_zeros, PatternError, PatternMatrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StochasticError {
    #[error("matrix is {rows}x{cols}, expected square of size {len}")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("not a contraction: {0} has squared norm {1} > 1")]
    NotContraction(String, f64),
    #[error("diagonal computations disagree at index {index}: {direct} vs {via_schur}")]
    Disagree { index: usize, direct: f64, via_schur: f64 },
    #[error("sequence must be finitely supported")]
    NotFinite,
}

/// Both computations of `E(L diag(η) Lᵀ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationDiag<T> {
    /// Diagonal of the full product `L diag(η) Lᵀ`.
    pub direct: Vec<T>,
    /// `schur_square(L) η`.
    pub via_schur: Vec<T>,
    pub max_deviation: f64,
}

/// Necessary conditions for `‖L‖ <= 1`: every row and column has norm at most one.
pub fn check_contraction<T: Scalar>(l: &DenseMatrix<T>, tol: f64) -> Result<(), StochasticError> {
    let q = l.schur_square();
    let one = T::one();
    let over = |s: &T| if T::EXACT { *s > one } else { s.to_f64() > 1.0 + tol };
    for (j, s) in q.col_sums().iter().enumerate() {
        if over(s) {
            return Err(StochasticError::NotContraction(format!("column {}", j + 1), s.to_f64()));
        }
    }
    for (i, s) in q.row_sums().iter().enumerate() {
        if over(s) {
            return Err(StochasticError::NotContraction(format!("row {}", i + 1), s.to_f64()));
        }
    }
    Ok(())
}

pub fn expectation_diag<T: Scalar>(l: &DenseMatrix<T>, eta: &[T], tol: f64) -> Result<ExpectationDiag<T>, StochasticError> {
    if !l.is_square() || l.rows() != eta.len() {
        return Err(StochasticError::Shape { rows: l.rows(), cols: l.cols(), len: eta.len() });
    }
    check_contraction(l, tol)?;
    let product = l.matmul(&DenseMatrix::diagonal(eta)).matmul(&l.transpose());
    let direct = product.diag();
    let via_schur = l.schur_square().mul_vec(eta);
    let mut max_deviation: f64 = 0.0;
    for (k, (a, b)) in direct.iter().zip(&via_schur).enumerate() {
        max_deviation = max_deviation.max((a.to_f64() - b.to_f64()).abs());
        if !a.close(b, tol) {
            return Err(StochasticError::Disagree { index: k + 1, direct: a.to_f64(), via_schur: b.to_f64() });
        }
    }
    Ok(ExpectationDiag { direct, via_schur, max_deviation })
}

/// Exact version on sequences: the diagonal as a finitely supported sequence.
pub fn expectation_diag_seq(l: &DenseMatrix<Rational>, eta: &Sequence) -> Result<Sequence, StochasticError> {
    if !eta.is_finite() {
        return Err(StochasticError::NotFinite);
    }
    let e = expectation_diag(l, &eta.padded(l.rows()), 0.0)?;
    Ok(Sequence::finite(e.direct).expect("diagonal of a positive operator is nonnegative"))
}

/// `diag(M diag(η) Mᵀ)` for a matrix with square-root entries, when rational.
pub fn surd_expectation_diag(m: &DenseMatrix<Surd>, eta: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(m.cols(), eta.len(), "incompatible dimensions");
    let eta: Vec<Surd> = eta.iter().cloned().map(Surd::from_rational).collect();
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let mut acc = Surd::zero();
            for (x, e) in row.iter().zip(&eta) {
                if !x.is_zero() && !e.is_zero() {
                    acc = &acc + &(&(x * e) * x);
                }
            }
            acc.to_rational()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};

    #[test]
    fn identity_and_permutation() {
        let eta = vec![int(3), int(1), int(0)];
        let id = DenseMatrix::<Rational>::identity(3);
        assert_eq!(expectation_diag(&id, &eta, 0.0).unwrap().direct, eta);
        // P e_j = e_{π(j)} with π = (1 2 3) -> (2 3 1)
        let perm = DenseMatrix::from_fn(3, 3, |i, j| if i == (j + 1) % 3 { int(1) } else { int(0) });
        let out = expectation_diag(&perm, &eta, 0.0).unwrap();
        assert_eq!(out.direct, vec![int(0), int(3), int(1)]);
        assert_eq!(out.max_deviation, 0.0);
    }

    #[test]
    fn givens_on_three_one_zero() {
        let a = Surd::sqrt(&rat(2, 3)).unwrap();
        let b = Surd::sqrt(&rat(1, 3)).unwrap();
        let mut g = DenseMatrix::<Surd>::identity(3);
        g.set(0, 0, a.clone());
        g.set(0, 2, b.clone());
        g.set(2, 0, -&b);
        g.set(2, 2, a);
        let d = surd_expectation_diag(&g, &[int(3), int(1), int(0)]).unwrap();
        assert_eq!(d, vec![int(2), int(1), int(1)]);
        let q = surd_schur_square(&g).unwrap();
        assert_eq!(q.mul_vec(&[int(3), int(1), int(0)]), d);
    }

    #[test]
    fn rejects_non_contractions() {
        let l = DenseMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(0), int(0)]]).unwrap();
        assert!(matches!(expectation_diag(&l, &[int(1), int(1)], 0.0), Err(StochasticError::NotContraction(..))));
        let l = DenseMatrix::<Rational>::identity(2);
        assert!(matches!(expectation_diag(&l, &[int(1)], 0.0), Err(StochasticError::Shape { .. })));
    }

    #[test]
    fn sequence_wrapper() {
        let l = DenseMatrix::from_rows(vec![vec![rat(1, 2), int(0)], vec![int(0), int(1)]]).unwrap();
        let s = expectation_diag_seq(&l, &Sequence::finite(vec![int(4)]).unwrap()).unwrap();
        assert_eq!(s.terms(), &[int(1), int(0)]);
    }
}
