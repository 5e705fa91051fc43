//! Haar-distributed orthogonal matrices and orbit sampling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::verify_necessity_bound;
use super::{float_majorize, ASSERT_TOL};
use crate::relations::Status;
use crate::stochastic::matrix::DenseMatrix;

/// Generator for sample `index` of the stream selected by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// QR of a Gaussian matrix with `R` normalized to a positive diagonal.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    DenseMatrix::from_fn(n, n, |i, j| if r[(j, j)] < 0.0 { -q[(i, j)] } else { q[(i, j)] })
}

/// Diagonal of `U diag(η) Uᵀ`.
pub fn conjugated_diagonal(u: &DenseMatrix<f64>, eta: &[f64]) -> Vec<f64> {
    (0..u.rows())
        .map(|i| u.row(i).iter().zip(eta).map(|(x, e)| x * x * e).sum())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleOptions {
    pub samples: usize,
    pub seed: u64,
    pub keep_diagonals: bool,
    /// Also run the necessity bound on `U∘U` at this `ε`.
    pub bound_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleViolation {
    pub sample: usize,
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleReport {
    pub seed: u64,
    pub dimension: usize,
    pub samples: usize,
    pub max_orthogonality_error: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagonals: Vec<Vec<f64>>,
    pub violations: Vec<SampleViolation>,
}

fn zeros(v: &[f64]) -> usize {
    v.iter().filter(|x| x.abs() <= ASSERT_TOL).count()
}

/// Samples `U` and checks that `diag(U diag(η) Uᵀ)` is majorized by `η` and
/// has no more zeros than `η`.
pub fn sample_orbit_expectation(eta: &[f64], opts: &SampleOptions) -> SampleReport {
    let n = eta.len();
    let kernel_eta = zeros(eta);
    let results: Vec<(Vec<f64>, f64, Vec<SampleViolation>)> = (0..opts.samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(opts.seed, s as u64);
            let u = haar_orthogonal(n, &mut rng);
            let ortho = u.gram_rows().max_abs_diff(&DenseMatrix::identity(n));
            let d = conjugated_diagonal(&u, eta);
            let mut v = Vec::new();
            let m = float_majorize(&d, eta, ASSERT_TOL);
            if m.status != Status::Holds {
                v.push(SampleViolation { sample: s, kind: "majorization".into(), detail: format!("prefix {:?}", m.witness) });
            }
            let kd = zeros(&d);
            if kd > kernel_eta {
                v.push(SampleViolation { sample: s, kind: "kernel".into(), detail: format!("{kd} zeros > {kernel_eta}") });
            }
            if let Some(eps) = opts.bound_eps {
                let q = u.map(|x| x * x);
                let r = kernel_eta.saturating_sub(kd);
                match verify_necessity_bound(&q, eta, r, &eps, ASSERT_TOL) {
                    Ok(rep) if rep.violations.is_empty() => {}
                    Ok(rep) => v.push(SampleViolation { sample: s, kind: "bound".into(), detail: format!("m in {:?}", rep.violations) }),
                    Err(e) => v.push(SampleViolation { sample: s, kind: "bound".into(), detail: e.to_string() }),
                }
            }
            (d, ortho, v)
        })
        .collect();
    let mut report = SampleReport {
        seed: opts.seed,
        dimension: n,
        samples: opts.samples,
        max_orthogonality_error: 0.0,
        diagonals: Vec::new(),
        violations: Vec::new(),
    };
    for (d, ortho, v) in results {
        report.max_orthogonality_error = report.max_orthogonality_error.max(ortho);
        if opts.keep_diagonals {
            report.diagonals.push(d);
        }
        report.violations.extend(v);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ORTHO_TOL;

    fn opts(samples: usize, seed: u64) -> SampleOptions {
        SampleOptions { samples, seed, keep_diagonals: false, bound_eps: None }
    }

    #[test]
    fn orthogonal_and_reproducible() {
        let mut rng = sample_rng(7, 0);
        let u1 = haar_orthogonal(1, &mut rng);
        assert_eq!(u1[(0, 0)].abs(), 1.0);
        let a = haar_orthogonal(3, &mut sample_rng(42, 3));
        let b = haar_orthogonal(3, &mut sample_rng(42, 3));
        assert_eq!(a, b);
        assert!(a.gram_rows().max_abs_diff(&DenseMatrix::identity(3)) <= ORTHO_TOL);
        for s in 0..50 {
            let u = haar_orthogonal(5, &mut sample_rng(1, s));
            let t = u.transpose();
            for j in 0..5 {
                let norm: f64 = t.row(j).iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() <= ORTHO_TOL);
            }
        }
    }

    #[test]
    fn two_by_two_diagonal_is_cos_sin() {
        let r = sample_orbit_expectation(&[1.0, 0.0], &SampleOptions { keep_diagonals: true, ..opts(20, 3) });
        assert!(r.violations.is_empty());
        for d in &r.diagonals {
            assert!((d[0] + d[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schur_direction_holds() {
        let r = sample_orbit_expectation(&[3.0, 1.0, 0.0], &SampleOptions { bound_eps: Some(0.5), ..opts(2000, 11) });
        assert!(r.violations.is_empty(), "{:?}", &r.violations[..r.violations.len().min(3)]);
        assert!(r.max_orthogonality_error <= ORTHO_TOL);
    }

    #[test]
    fn hand_rotation_keeps_kernel_bound() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = DenseMatrix::from_rows(vec![vec![h, h, 0.0], vec![-h, h, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let d = conjugated_diagonal(&u, &[0.0, 2.0, 1.0]);
        for (x, y) in d.iter().zip([1.0, 1.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(zeros(&d), 0);
    }
}
