use serde::Serialize;
use thiserror::Error;

use super::matrix::{is_nonnegative, surd_schur_square, DenseMatrix, Entry, Scalar};
use crate::numerics::rational::Rational;
use crate::numerics::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("matrix has a negative entry")]
    NegativeEntry,
    #[error("certificate is not orthogonal: (L Lᵀ)[{row}][{col}] is off")]
    NotOrthogonal { row: usize, col: usize },
    #[error("certificate Schur-square differs from the matrix at ({row}, {col})")]
    Mismatch { row: usize, col: usize },
    #[error("certificate has shape {0}x{1}, matrix has {2}x{3}")]
    Shape(usize, usize, usize, usize),
}

/// Membership flags for the classes of nonnegative matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StochasticClass {
    pub substochastic: bool,
    pub column_stochastic: bool,
    pub row_stochastic: bool,
    pub doubly_stochastic: bool,
    pub unistochastic: bool,
    pub orthostochastic: bool,
    /// Zero in exact mode.
    pub tolerance: f64,
    /// Whether an orthogonal certificate was supplied and verified.
    pub certified: bool,
}

/// An orthogonal matrix offered as proof that `Q` is its Schur-square.
pub trait OrthogonalWitness<T: Scalar> {
    fn verify(&self, q: &DenseMatrix<T>, tol: f64) -> Result<(), ClassifyError>;
}

fn check_shape<A, B>(l: &DenseMatrix<A>, q: &DenseMatrix<B>) -> Result<(), ClassifyError>
where
    A: Clone,
    B: Clone,
{
    if (l.rows(), l.cols()) != (q.rows(), q.cols()) || !l.is_square() {
        return Err(ClassifyError::Shape(l.rows(), l.cols(), q.rows(), q.cols()));
    }
    Ok(())
}

fn first_off_identity<T: Entry>(g: &DenseMatrix<T>, ok: impl Fn(&T, bool) -> bool) -> Option<(usize, usize)> {
    (0..g.rows())
        .flat_map(|i| (0..g.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !ok(&g[(i, j)], i == j))
}

impl OrthogonalWitness<Rational> for DenseMatrix<Surd> {
    fn verify(&self, q: &DenseMatrix<Rational>, _tol: f64) -> Result<(), ClassifyError> {
        check_shape(self, q)?;
        let g = self.gram_rows();
        if let Some((row, col)) = first_off_identity(&g, |x, d| if d { x.is_one() } else { x.is_zero() }) {
            return Err(ClassifyError::NotOrthogonal { row, col });
        }
        let sq = surd_schur_square(self).ok_or(ClassifyError::Mismatch { row: 0, col: 0 })?;
        match first_mismatch(&sq, q, 0.0) {
            Some((row, col)) => Err(ClassifyError::Mismatch { row, col }),
            None => Ok(()),
        }
    }
}

impl<T: Scalar> OrthogonalWitness<T> for DenseMatrix<T> {
    fn verify(&self, q: &DenseMatrix<T>, tol: f64) -> Result<(), ClassifyError> {
        check_shape(self, q)?;
        let g = self.gram_rows();
        let (one, zero) = (T::one(), T::zero());
        if let Some((row, col)) = first_off_identity(&g, |x, d| x.close(if d { &one } else { &zero }, tol)) {
            return Err(ClassifyError::NotOrthogonal { row, col });
        }
        match first_mismatch(&self.schur_square(), q, tol) {
            Some((row, col)) => Err(ClassifyError::Mismatch { row, col }),
            None => Ok(()),
        }
    }
}

fn first_mismatch<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>, tol: f64) -> Option<(usize, usize)> {
    (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !a[(i, j)].close(&b[(i, j)], tol))
}

/// Row and column sum tests; exact for rationals, within `tol` for floats.
pub fn classify<T: Scalar>(q: &DenseMatrix<T>, tol: f64) -> Result<StochasticClass, ClassifyError> {
    if !is_nonnegative(q) {
        return Err(ClassifyError::NegativeEntry);
    }
    let one = T::one();
    let le_one = |s: &T| s.to_f64() <= 1.0 + tol && (!T::EXACT || *s <= one);
    let rows = q.row_sums();
    let cols = q.col_sums();
    let sub = rows.iter().all(le_one) && cols.iter().all(le_one);
    let column = sub && cols.iter().all(|s| s.close(&one, tol));
    let row = sub && rows.iter().all(|s| s.close(&one, tol));
    Ok(StochasticClass {
        substochastic: sub,
        column_stochastic: column,
        row_stochastic: row,
        doubly_stochastic: column && row,
        unistochastic: false,
        orthostochastic: false,
        tolerance: if T::EXACT { 0.0 } else { tol },
        certified: false,
    })
}

/// [`classify`] plus the certificate-only classes. A certificate that is
/// not orthogonal or does not square to `q` is an error.
pub fn classify_certified<T: Scalar, W: OrthogonalWitness<T>>(
    q: &DenseMatrix<T>,
    witness: &W,
    tol: f64,
) -> Result<StochasticClass, ClassifyError> {
    let mut c = classify(q, tol)?;
    witness.verify(q, tol)?;
    c.unistochastic = true;
    c.orthostochastic = true;
    c.certified = true;
    Ok(c)
}

/// `(LᵀL = I, L Lᵀ = I)`: isometry and co-isometry tests.
pub fn isometry_flags<T: Scalar>(l: &DenseMatrix<T>, tol: f64) -> (bool, bool) {
    let near_identity = |g: DenseMatrix<T>| {
        let (one, zero) = (T::one(), T::zero());
        first_off_identity(&g, |x, d| x.close(if d { &one } else { &zero }, tol)).is_none()
    };
    (near_identity(l.transpose().gram_rows()), near_identity(l.gram_rows()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};

    fn half() -> DenseMatrix<Rational> {
        DenseMatrix::from_fn(2, 2, |_, _| rat(1, 2))
    }

    #[test]
    fn rotation_certifies_half_matrix() {
        let h = Surd::sqrt(&rat(1, 2)).unwrap();
        let rot = DenseMatrix::from_rows(vec![vec![h.clone(), h.clone()], vec![-&h, h]]).unwrap();
        let c = classify_certified(&half(), &rot, 0.0).unwrap();
        assert!(c.doubly_stochastic && c.orthostochastic && c.unistochastic && c.certified);
    }

    #[test]
    fn substochastic_only() {
        let q = DenseMatrix::from_rows(vec![vec![int(1), int(0)], vec![int(0), rat(1, 2)]]).unwrap();
        let c = classify(&q, 0.0).unwrap();
        assert!(c.substochastic);
        assert!(!c.row_stochastic && !c.column_stochastic && !c.orthostochastic);
    }

    #[test]
    fn certificate_mismatch_is_reported() {
        let id = DenseMatrix::<Surd>::identity(2);
        assert_eq!(
            classify_certified(&half(), &id, 0.0).unwrap_err(),
            ClassifyError::Mismatch { row: 0, col: 0 }
        );
        let skew = DenseMatrix::from_rows(vec![vec![Surd::one(), Surd::one()], vec![Surd::zero(), Surd::one()]]).unwrap();
        assert!(matches!(
            classify_certified(&half(), &skew, 0.0),
            Err(ClassifyError::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn float_classes_and_isometries() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let rot = DenseMatrix::from_rows(vec![vec![c, c], vec![c, -c]]).unwrap();
        let q = rot.schur_square();
        let class = classify_certified(&q, &rot, 1e-12).unwrap();
        assert!(class.doubly_stochastic && class.orthostochastic);
        // a 3x2 isometry: columns orthonormal, rows not
        let iso = DenseMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, c], vec![0.0, c]]).unwrap();
        assert_eq!(isometry_flags(&iso, 1e-12), (true, false));
        let q = classify(&iso.schur_square(), 1e-12).unwrap();
        assert!(q.column_stochastic && !q.row_stochastic);
        assert_eq!(isometry_flags(&iso.transpose(), 1e-12), (false, true));
    }

    #[test]
    fn negative_entries_rejected() {
        let q = DenseMatrix::from_rows(vec![vec![int(-1)]]).unwrap();
        assert_eq!(classify(&q, 0.0).unwrap_err(), ClassifyError::NegativeEntry);
    }
}
