//! Randomized search for diagonals of orthogonal conjugates that escape the
//! approximate `p`-majorization region. A heuristic: it never proves anything.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::haar::{conjugated_diagonal, haar_orthogonal, sample_rng};
use super::{float_majorize, float_p_witness, ASSERT_TOL};
use crate::relations::Status;
use crate::stochastic::matrix::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub sample: usize,
    pub kernel: usize,
    pub p: usize,
    pub diagonal: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchReport {
    pub seed: u64,
    pub dimension: usize,
    pub budget: usize,
    /// Samples drawn for each kernel size `N = 0..=|η⁻¹(0)|`.
    pub per_kernel: Vec<usize>,
    pub candidates: Vec<Candidate>,
}

/// Conjugates `diag η` by `I_N ⊕ U` after moving `N` zeros of `η` to the
/// front, so the diagonal keeps exactly `N` zeros, then tests it against
/// `≾_p` with `p = |η⁻¹(0)| − N`.
pub fn conjecture_search(eta: &[f64], budget: usize, seed: u64) -> SearchReport {
    let n = eta.len();
    let zero_pos: Vec<usize> = (0..n).filter(|&i| eta[i].abs() <= ASSERT_TOL).collect();
    let kz = zero_pos.len();
    let results: Vec<(usize, Option<Candidate>)> = (0..budget)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(seed, s as u64);
            let kernel = s % (kz + 1);
            let fixed: Vec<usize> = zero_pos[..kernel].to_vec();
            let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
            let w = haar_orthogonal(free.len(), &mut rng);
            let mut u = DenseMatrix::<f64>::identity(n);
            for (a, &i) in free.iter().enumerate() {
                for (b, &j) in free.iter().enumerate() {
                    u.set(i, j, w[(a, b)]);
                }
            }
            let d = conjugated_diagonal(&u, eta);
            let p = kz - kernel;
            let m = float_majorize(&d, eta, ASSERT_TOL);
            let reason = if m.status != Status::Holds {
                Some(format!("not majorized at prefix {:?}", m.witness))
            } else if float_p_witness(&d, eta, p, ASSERT_TOL).witness.is_none() {
                Some(format!("no starting index for p = {p}"))
            } else {
                None
            };
            (kernel, reason.map(|reason| Candidate { sample: s, kernel, p, diagonal: d, reason }))
        })
        .collect();
    let mut per_kernel = vec![0; kz + 1];
    let mut candidates = Vec::new();
    for (k, c) in results {
        per_kernel[k] += 1;
        candidates.extend(c);
    }
    SearchReport { seed, dimension: n, budget, per_kernel, candidates }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_candidates_on_small_examples() {
        let r = conjecture_search(&[1.0, 0.0, 0.0], 3000, 5);
        assert!(r.candidates.is_empty());
        assert_eq!(r.per_kernel, vec![1000, 1000, 1000]);
        let r = conjecture_search(&[2.0, 1.0, 1.0, 0.0], 2000, 6);
        assert!(r.candidates.is_empty());
        let r = conjecture_search(&[0.0, 0.0], 10, 1);
        assert!(r.candidates.is_empty());
    }
}
