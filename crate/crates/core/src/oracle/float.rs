//! Float partial sums, written separately from the exact relations code.

use crate::relations::Status;

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn prefix(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for x in v {
        acc += x;
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatVerdict {
    pub status: Status,
    /// First violated prefix (failure) or minimal starting index (shifted success).
    pub witness: Option<usize>,
}

/// `ξ ≺ η` for finite nonnegative vectors, within `tol`.
pub fn float_majorize(xi: &[f64], eta: &[f64], tol: f64) -> FloatVerdict {
    let n = xi.len().max(eta.len());
    let (mut x, mut e) = (sorted_desc(xi), sorted_desc(eta));
    x.resize(n, 0.0);
    e.resize(n, 0.0);
    let (sx, se) = (prefix(&x), prefix(&e));
    if let Some(k) = (1..=n).find(|&k| sx[k] > se[k] + tol) {
        return FloatVerdict { status: Status::Fails, witness: Some(k) };
    }
    if (sx[n] - se[n]).abs() > tol {
        return FloatVerdict { status: Status::Fails, witness: None };
    }
    FloatVerdict { status: Status::Holds, witness: None }
}

/// Minimal `N` with `Σ^{n+p} ξ* ≤ Σ^n η*` for all `n ≥ N`, given majorization.
pub fn float_p_witness(xi: &[f64], eta: &[f64], p: usize, tol: f64) -> FloatVerdict {
    let m = float_majorize(xi, eta, tol);
    if m.status != Status::Holds {
        return m;
    }
    let n = xi.len().max(eta.len());
    let (x, e) = (sorted_desc(xi), sorted_desc(eta));
    let (sx, se) = (prefix(&x), prefix(&e));
    let at = |s: &[f64], k: usize| s[k.min(s.len() - 1)];
    let last_bad = (1..=n + 1).filter(|&k| at(&sx, k + p) > at(&se, k) + tol).max();
    FloatVerdict { status: Status::Holds, witness: Some(last_bad.map_or(1, |k| k + 1)) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_hand_examples() {
        assert_eq!(float_majorize(&[2.0, 1.0, 1.0], &[3.0, 1.0, 0.0], 1e-9).status, Status::Holds);
        assert_eq!(float_majorize(&[3.0, 1.0], &[2.0, 2.0], 1e-9).witness, Some(1));
        assert_eq!(float_majorize(&[1.0, 1.0], &[3.0], 1e-9).status, Status::Fails);
        assert_eq!(float_p_witness(&[2.0, 1.0, 1.0, 0.0], &[3.0, 1.0, 0.0, 0.0], 1, 1e-9).witness, Some(1));
        assert_eq!(float_p_witness(&[2.0, 1.0, 1.0, 0.0], &[3.0, 1.0, 0.0, 0.0], 2, 1e-9).witness, Some(2));
    }
}
