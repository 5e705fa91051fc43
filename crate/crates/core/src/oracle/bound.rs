//! The necessity bound for `ξ = Qη′` with `Q` doubly stochastic.
//!
//! After permuting rows so that `ξ = ⟨0 (N times), s(B)⟩` and columns so that
//! `η′ = ⟨0 (N + r times), s(A)⟩`, the smallest `N_{r,ε} > N + r` with
//! `N + r − ε < Σ_{i ≤ N_{r,ε}} Σ_{j ≤ N+r} q_ij` makes
//! `Σ^m ξ ≤ Σ_{j=N+r+1}^m η′_j + ε η′_{m+1}` hold for every `m ≥ N_{r,ε}`.

use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::numerics::rational::Rational;
use crate::numerics::sequence::cumulative;
use crate::stochastic::matrix::{DenseMatrix, Scalar};
use crate::stochastic::pattern::pattern_next_column;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    /// Zeros of `ξ = Qη′`.
    pub kernel: usize,
    pub r: usize,
    pub n_r_eps: usize,
    /// Number of `m` checked.
    pub checked: usize,
    pub violations: Vec<usize>,
    /// `n` with `Σ^{n+r} ξ* > Σ^n s(A)`: where plain `≺_r` fails.
    pub shifted_failures: Vec<usize>,
}

impl NecessityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_zero<T: Scalar>(x: &T, tol: f64) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.to_f64().abs() <= tol
    }
}

fn leq<T: Scalar>(a: &T, b: &T, tol: f64) -> bool {
    if T::EXACT {
        a <= b
    } else {
        a.to_f64() <= b.to_f64() + tol
    }
}

fn check_doubly_stochastic<T: Scalar>(q: &DenseMatrix<T>, tol: f64) -> Result<(), OracleError> {
    let one = T::one();
    let bad = |v: Vec<T>, what: &str| {
        v.iter()
            .position(|s| !s.close(&one, tol))
            .map(|i| OracleError::NotDoublyStochastic(format!("{what} {} sums to {}", i + 1, v[i].to_f64())))
    };
    if let Some(e) = bad(q.row_sums(), "row").or_else(|| bad(q.col_sums(), "column")) {
        return Err(e);
    }
    for i in 0..q.rows() {
        for j in 0..q.cols() {
            if !leq(&T::zero(), &q[(i, j)], tol) {
                return Err(OracleError::NotDoublyStochastic(format!("entry ({}, {}) is negative", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

fn order<T: Scalar>(v: &[T], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    // zeros first, then decreasing
    idx.sort_by(|&a, &b| {
        let (za, zb) = (is_zero(&v[a], tol), is_zero(&v[b], tol));
        zb.cmp(&za).then_with(|| v[b].partial_cmp(&v[a]).unwrap_or(std::cmp::Ordering::Equal))
    });
    idx
}

fn sums<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero()];
    for x in v {
        let next = out.last().expect("nonempty").add(x);
        out.push(next);
    }
    out
}

pub fn verify_necessity_bound<T: Scalar>(
    q: &DenseMatrix<T>,
    eta: &[T],
    r: usize,
    eps: &T,
    tol: f64,
) -> Result<NecessityReport, OracleError> {
    let n = eta.len();
    if q.rows() != n || q.cols() != n {
        return Err(OracleError::Shape(format!("{}x{} matrix against length {n}", q.rows(), q.cols())));
    }
    if !leq(&T::zero(), eps, 0.0) || is_zero(eps, 0.0) || !leq(eps, &T::one(), 0.0) || eps.close(&T::one(), 0.0) {
        return Err(OracleError::BadEpsilon);
    }
    check_doubly_stochastic(q, tol)?;
    let xi = q.mul_vec(eta);
    let kernel = xi.iter().filter(|x| is_zero(*x, tol)).count();
    let kernel_eta = eta.iter().filter(|x| is_zero(*x, tol)).count();
    let k = kernel + r;
    if kernel_eta < k {
        return Err(OracleError::KernelMismatch { eta: kernel_eta, need: k });
    }
    let (rows, cols) = (order(&xi, tol), order(eta, tol));
    let xs: Vec<T> = rows.iter().map(|&i| xi[i].clone()).collect();
    // zero columns first, then s(A) decreasing with any remaining zeros last
    let mut cols_nf: Vec<usize> = cols[..k].to_vec();
    let mut rest: Vec<usize> = cols[k..].to_vec();
    rest.sort_by(|&a, &b| eta[b].partial_cmp(&eta[a]).unwrap_or(std::cmp::Ordering::Equal));
    cols_nf.extend(rest);
    let es: Vec<T> = cols_nf.iter().map(|&j| eta[j].clone()).collect();
    let target = T::from_rational(&Rational::from_integer((k as i64).into())).sub(eps);
    let mut mass = T::zero();
    let mut n_r_eps = None;
    for (m, &row) in rows.iter().enumerate() {
        for &c in &cols_nf[..k] {
            mass = mass.add(&q[(row, c)]);
        }
        if m + 1 > k && target < mass {
            n_r_eps = Some(m + 1);
            break;
        }
    }
    let n_r_eps = n_r_eps.ok_or_else(|| OracleError::NotDoublyStochastic("no index satisfies the column-mass bound".into()))?;
    let (sx, se) = (sums(&xs), sums(&es));
    let mut violations = Vec::new();
    for m in n_r_eps..=n {
        let next = es.get(m).cloned().unwrap_or_else(T::zero);
        let rhs = se[m].sub(&se[k]).add(&eps.mul(&next));
        if !leq(&sx[m], &rhs, tol) {
            violations.push(m);
        }
    }
    let positive_xi: Vec<T> = xs[kernel..].to_vec();
    let (sb, sa) = (sums(&positive_xi), sums(&es[k..]));
    let at = |s: &[T], i: usize| s[i.min(s.len() - 1)].clone();
    let shifted_failures = (1..=sa.len().saturating_sub(1))
        .filter(|&i| !leq(&at(&sb, i + r), &at(&sa, i), tol))
        .collect();
    Ok(NecessityReport { kernel, r, n_r_eps, checked: n + 1 - n_r_eps, violations, shifted_failures })
}

/// For the leading `w×w` window of the pattern matrix with weights `weights`
/// and positive decreasing `η`, lower bounds for `Σ^n (Q⟨0, η⟩)` minus
/// `Σ^{n−1} η`, for `n = 1..=w`. The inequality is strict when every entry is positive.
pub fn eq35_window(q: &DenseMatrix<Rational>, weights: &[Rational], eta: &[Rational]) -> Vec<Rational> {
    let w = q.rows();
    let mut tilde = vec![Rational::from_integer(0.into())];
    tilde.extend(eta.iter().take(w - 1).cloned());
    let mut xi = q.mul_vec(&tilde);
    if let (Ok(col), Some(e)) = (pattern_next_column(weights, w), eta.get(w - 1)) {
        for (x, c) in xi.iter_mut().zip(col) {
            *x += c * e;
        }
    }
    let (sx, se) = (cumulative(&xi), cumulative(eta));
    (1..=w).map(|n| &sx[n] - &se[n - 1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, pow2_inv, rat};
    use crate::stochastic::pattern::{block_extend, pattern_orthostochastic, pattern_window, rational_unit_vector, spread_zeros};
    use num_traits::Signed;

    #[test]
    fn permutation_gives_plain_majorization() {
        let q = DenseMatrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        let rep = verify_necessity_bound(&q, &[int(1), int(3)], 0, &rat(1, 2), 0.0).unwrap();
        assert_eq!((rep.n_r_eps, rep.kernel), (1, 0));
        assert!(rep.holds());
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = DenseMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(0), int(0)]]).unwrap();
        assert!(matches!(verify_necessity_bound(&q, &[int(1), int(0)], 0, &rat(1, 2), 0.0), Err(OracleError::NotDoublyStochastic(_))));
        let id = DenseMatrix::<Rational>::identity(2);
        assert!(matches!(verify_necessity_bound(&id, &[int(1), int(0)], 2, &rat(1, 2), 0.0), Err(OracleError::KernelMismatch { .. })));
        assert!(matches!(verify_necessity_bound(&id, &[int(1), int(0)], 0, &int(1), 0.0), Err(OracleError::BadEpsilon)));
    }

    #[test]
    fn block_extended_pattern_bound_with_shift_failure() {
        let w = 12;
        for p in 1..=3 {
            let base = pattern_orthostochastic(&rational_unit_vector(w - 2 * (p - 1))).unwrap();
            let q = block_extend(&base.q, p);
            let eta: Vec<Rational> = (1..=(w - p) as u32).map(pow2_inv).collect();
            let tilde = spread_zeros(&eta, p);
            for eps in [rat(1, 2), rat(1, 64)] {
                let rep = verify_necessity_bound(&q, &tilde, p, &eps, 0.0).unwrap();
                assert!(rep.holds(), "p={p}");
                assert_eq!(rep.kernel, 0);
                assert!(!rep.shifted_failures.is_empty(), "p={p}");
            }
        }
    }

    #[test]
    fn infinite_weight_window_is_strict() {
        let w = 16;
        let weights: Vec<Rational> = (1..=(w + 1) as u32).map(pow2_inv).collect();
        let q = pattern_window(&weights, w).unwrap().q;
        let eta: Vec<Rational> = (1..=w as u32).map(pow2_inv).collect();
        assert!(eq35_window(&q, &weights, &eta).iter().all(|d| d.is_positive()));
    }
}
