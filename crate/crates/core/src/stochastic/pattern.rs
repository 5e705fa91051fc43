//! Orthostochastic matrices with the zero pattern `Q_ij = 0 ⟺ i > j > 1`.
//!
//! Given weights `w_i = v_i²` with partial sums `S_j = Σ_{i<j} w_i`, the
//! matrix whose first column is `v` and whose column `j >= 2` is the
//! Gram–Schmidt image of `e_j` against `v, e_n, e_{n-1}, …, e_{j+1}` has
//! entries
//!
//! * `O_i1 = √w_i`,
//! * `O_ij = √(w_i w_j / (S_j S_{j+1}))` for `i < j`,
//! * `O_jj = −√(S_j / S_{j+1})`,
//! * `O_ij = 0` for `i > j > 1`.
//!
//! Column `j` only involves `w_1, …, w_j`, so the same formulas give the
//! leading window of the infinite matrix built from an infinite unit vector.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::matrix::{surd_schur_square, DenseMatrix, Scalar};
use crate::numerics::rational::Rational;
use crate::numerics::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("entry {0} of v is not strictly positive")]
    NotPositive(usize),
    #[error("v does not have unit norm")]
    NotUnit,
    #[error("need {need} weights, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("window dimension must be positive")]
    Empty,
}

/// An orthogonal matrix (or a leading window of one) and its Schur-square.
#[derive(Debug, Clone)]
pub struct PatternMatrix {
    pub orthogonal: DenseMatrix<Surd>,
    pub q: DenseMatrix<Rational>,
}

fn partial(w: &[Rational]) -> Vec<Rational> {
    // s[j] = S_j = Σ_{i<j} w_i with 1-based j, s[0] unused
    let mut s = vec![Rational::zero(); w.len() + 2];
    for j in 2..s.len() {
        s[j] = &s[j - 1] + &w[j - 2];
    }
    s
}

fn surd_sqrt(r: &Rational) -> Surd {
    Surd::sqrt(r).expect("nonnegative radicand")
}

/// Leading `n×n` window of the pattern matrix for weights `w_1, w_2, …`
/// (at least `n` of them, all positive, summing to at most 1).
pub fn pattern_window(w: &[Rational], n: usize) -> Result<PatternMatrix, PatternError> {
    if n == 0 {
        return Err(PatternError::Empty);
    }
    if w.len() < n {
        return Err(PatternError::TooShort { need: n, got: w.len() });
    }
    let w = &w[..n];
    if let Some(i) = w.iter().position(|x| !x.is_positive()) {
        return Err(PatternError::NotPositive(i + 1));
    }
    let s = partial(w);
    let orthogonal = DenseMatrix::from_fn(n, n, |i, j| {
        let (i, j) = (i + 1, j + 1);
        if j == 1 {
            surd_sqrt(&w[i - 1])
        } else if i < j {
            surd_sqrt(&(&w[i - 1] * &w[j - 1] / (&s[j] * &s[j + 1])))
        } else if i == j {
            -&surd_sqrt(&(&s[j] / &s[j + 1]))
        } else {
            Surd::zero()
        }
    });
    let q = surd_schur_square(&orthogonal).expect("monomial entries");
    Ok(PatternMatrix { orthogonal, q })
}

/// `Q_{i,n+1}` for `i <= n`: the first column beyond an `n`-window,
/// which needs `w_{n+1}`.
pub fn pattern_next_column(w: &[Rational], n: usize) -> Result<Vec<Rational>, PatternError> {
    if w.len() < n + 1 {
        return Err(PatternError::TooShort { need: n + 1, got: w.len() });
    }
    let s = partial(&w[..n + 1]);
    let j = n + 1;
    Ok((1..=n).map(|i| &w[i - 1] * &w[j - 1] / (&s[j] * &s[j + 1])).collect())
}

/// The full orthogonal `n×n` pattern matrix for a strictly positive unit vector `v`.
pub fn pattern_orthostochastic(v: &[Rational]) -> Result<PatternMatrix, PatternError> {
    if let Some(i) = v.iter().position(|x| !x.is_positive()) {
        return Err(PatternError::NotPositive(i + 1));
    }
    let w: Vec<Rational> = v.iter().map(|x| x * x).collect();
    if !w.iter().sum::<Rational>().is_one() {
        return Err(PatternError::NotUnit);
    }
    pattern_window(&w, v.len())
}

/// A strictly positive rational unit vector in dimension `n >= 1`,
/// by inverse stereographic projection of `(2, …, 2)`.
pub fn rational_unit_vector(n: usize) -> Vec<Rational> {
    if n == 1 {
        return vec![Rational::one()];
    }
    let t = Rational::from_integer(2.into());
    let norm2 = &t * &t * Rational::from_integer((n as i64 - 1).into());
    let denom = &norm2 + Rational::one();
    let mut v: Vec<Rational> = (0..n - 1).map(|_| &t * Rational::from_integer(2.into()) / &denom).collect();
    v.push((&norm2 - Rational::one()) / &denom);
    v
}

/// `⊕^{p-1} (½ ½; ½ ½) ⊕ Q`.
pub fn block_extend<T: Scalar>(q: &DenseMatrix<T>, p: usize) -> DenseMatrix<T> {
    assert!(p >= 1, "p must be at least 1");
    let half = T::from_rational(&Rational::new(1.into(), 2.into()));
    let block = DenseMatrix::from_fn(2, 2, |_, _| half.clone());
    let mut out = DenseMatrix::zeros(0, 0);
    for _ in 1..p {
        out = out.direct_sum(&block);
    }
    out.direct_sum(q)
}

/// The orthogonal certificate of [`block_extend`], built from `π/4` rotations.
pub fn block_extend_orthogonal(o: &DenseMatrix<Surd>, p: usize) -> DenseMatrix<Surd> {
    assert!(p >= 1, "p must be at least 1");
    let h = surd_sqrt(&Rational::new(1.into(), 2.into()));
    let rot = DenseMatrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), -&h]]).expect("2x2");
    let mut out = DenseMatrix::zeros(0, 0);
    for _ in 1..p {
        out = out.direct_sum(&rot);
    }
    out.direct_sum(o)
}

/// `η̃ = (0, η_1, 0, η_2, …, 0, η_{p-1}, 0, η_p, η_{p+1}, …)` with `p` zeros.
pub fn spread_zeros<T: super::matrix::Entry>(eta: &[T], p: usize) -> Vec<T> {
    assert!(p >= 1, "p must be at least 1");
    let mut out = Vec::with_capacity(eta.len() + p);
    for x in eta.iter().take(p - 1) {
        out.push(T::zero());
        out.push(x.clone());
    }
    out.push(T::zero());
    out.extend(eta.iter().skip(p - 1).cloned());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};
    use crate::stochastic::classify::classify_certified;

    #[test]
    fn two_by_two() {
        let m = pattern_orthostochastic(&[rat(3, 5), rat(4, 5)]).unwrap();
        let o: Vec<Vec<Rational>> = m.orthogonal.to_rows().iter().map(|r| r.iter().map(|x| x.to_rational().unwrap()).collect()).collect();
        assert_eq!(o, vec![vec![rat(3, 5), rat(4, 5)], vec![rat(4, 5), rat(-3, 5)]]);
        assert!(m.q.to_rows().iter().flatten().all(|x| x.is_positive()));
    }

    #[test]
    fn three_by_three_zero_pattern() {
        let m = pattern_orthostochastic(&[rat(2, 3), rat(2, 3), rat(1, 3)]).unwrap();
        assert_eq!(
            m.q.to_rows(),
            vec![
                vec![rat(4, 9), rat(1, 2), rat(1, 18)],
                vec![rat(4, 9), rat(1, 2), rat(1, 18)],
                vec![rat(1, 9), int(0), rat(8, 9)],
            ]
        );
        assert!(m.orthogonal.gram_rows().is_identity());
        let c = classify_certified(&m.q, &m.orthogonal, 0.0).unwrap();
        assert!(c.orthostochastic && c.doubly_stochastic);
    }

    #[test]
    fn pattern_holds_in_larger_dimensions() {
        for n in 1..=9 {
            let v = rational_unit_vector(n);
            let m = pattern_orthostochastic(&v).unwrap();
            assert!(m.orthogonal.gram_rows().is_identity(), "n={n}");
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(m.q[(i, j)].is_zero(), i > j && j > 0, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_vectors() {
        assert_eq!(pattern_orthostochastic(&[int(1), int(0)]).unwrap_err(), PatternError::NotPositive(2));
        assert_eq!(pattern_orthostochastic(&[rat(1, 2), rat(1, 2)]).unwrap_err(), PatternError::NotUnit);
    }

    #[test]
    fn window_of_infinite_matrix() {
        // w_i = 2^{-i}: every column but the first sums to one inside the window
        let w: Vec<Rational> = (1..=9u32).map(crate::numerics::rational::pow2_inv).collect();
        let m = pattern_window(&w, 8).unwrap();
        let cols = m.q.col_sums();
        assert_eq!(cols[0], int(1) - crate::numerics::rational::pow2_inv(8));
        assert!(cols[1..].iter().all(|c| c.is_one()));
        assert!(m.q.row_sums().iter().all(|r| *r < int(1)));
        let next = pattern_next_column(&w, 8).unwrap();
        assert!(next.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn block_extension() {
        let q = DenseMatrix::<Rational>::identity(1);
        assert_eq!(block_extend(&q, 1), q);
        let b = block_extend(&q, 2);
        assert_eq!(b.to_rows(), vec![
            vec![rat(1, 2), rat(1, 2), int(0)],
            vec![rat(1, 2), rat(1, 2), int(0)],
            vec![int(0), int(0), int(1)],
        ]);
        let m = pattern_orthostochastic(&rational_unit_vector(4)).unwrap();
        let o = block_extend_orthogonal(&m.orthogonal, 3);
        let q = block_extend(&m.q, 3);
        assert!(classify_certified(&q, &o, 0.0).unwrap().orthostochastic);
        assert_eq!(spread_zeros(&[int(5), int(4), int(3), int(2)], 3), vec![int(0), int(5), int(0), int(4), int(0), int(3), int(2)]);
        assert_eq!(spread_zeros(&[int(5)], 1), vec![int(0), int(5)]);
    }
}
