//! Interleaving indices, compression and the decompression rotations.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::plan::RotationStep;
use super::SynthesisError;
use crate::numerics::rational::Rational;
use crate::numerics::sequence::{cumulative, Sequence};

/// Blocks `(N_m, N'_m)`, 1-based, for `m = 1..p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interleaving {
    pub p: usize,
    pub n: Vec<usize>,
    pub n_prime: Vec<usize>,
    /// Last `n` at which the tail inequality was checked; `None` when checked for all `n`.
    pub checked_to: Option<usize>,
}

impl Interleaving {
    pub fn empty() -> Self {
        Interleaving { p: 0, n: vec![], n_prime: vec![], checked_to: None }
    }

    pub fn blocks(&self) -> usize {
        self.n.len()
    }

    pub fn is_complete(&self) -> bool {
        self.blocks() == self.p
    }
}

struct Sums {
    s: Vec<Rational>,
    finite: bool,
}

impl Sums {
    fn new(v: &[Rational], finite: bool) -> Self {
        Sums { s: cumulative(v), finite }
    }

    fn at(&self, n: usize) -> Option<&Rational> {
        match self.s.get(n) {
            Some(x) => Some(x),
            None if self.finite => self.s.last(),
            None => None,
        }
    }
}

fn term(xi: &[Rational], k: usize) -> Rational {
    xi.get(k - 1).cloned().unwrap_or_else(Rational::zero)
}

/// Greedy minimal blocks on listed data.
///
/// With `finite` set the lists are taken as padded by zeros and the tail
/// inequality `Σ^{n+m} ξ ≤ Σ^n η′` is decided for every `n`; otherwise it is
/// checked while both sums are listed.
pub fn select_on(xi: &[Rational], eta_p: &[Rational], p: usize, finite: bool) -> Result<Interleaving, SynthesisError> {
    let sx = Sums::new(xi, finite);
    let se = Sums::new(eta_p, finite);
    let last_n = if finite { xi.len().max(eta_p.len()) } else { eta_p.len() };
    let tail_ok = |start: usize, m: usize| {
        (start..=last_n).all(|n| match (sx.at(n + m), se.at(n)) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        })
    };
    let mut out = Interleaving {
        p,
        n: vec![],
        n_prime: vec![],
        checked_to: if finite { None } else { Some(last_n) },
    };
    let len = xi.len();
    let mut prev = 0;
    for m in 1..=p {
        let found = (prev + 2..len).find_map(|nm| {
            let (before, at) = (term(xi, nm - 1), term(xi, nm));
            if at >= before || !tail_ok(nm + 1 - m, m) {
                return None;
            }
            (nm + 1..=len)
                .find(|&np| &at + term(xi, np) <= before && !term(xi, np).is_zero())
                .map(|np| (nm, np))
        });
        match found {
            Some((nm, np)) => {
                out.n.push(nm);
                out.n_prime.push(np);
                prev = np;
            }
            None => return Err(SynthesisError::Incomplete { partial: out }),
        }
    }
    Ok(out)
}

/// Greedy interleaving for monotone `ξ` against `η′`.
pub fn select_interleaving(xi: &Sequence, eta_p: &Sequence, p: usize, horizon: usize) -> Result<Interleaving, SynthesisError> {
    let finite = xi.is_finite() && eta_p.is_finite();
    let cut = |s: &Sequence| s.terms()[..s.len().min(horizon)].to_vec();
    if !xi.is_monotone() || !eta_p.is_monotone() {
        return Err(SynthesisError::NotMonotone);
    }
    let within = finite && xi.len() <= horizon && eta_p.len() <= horizon;
    select_on(&cut(xi), &cut(eta_p), p, within)
}

fn block_of(i: &Interleaving, k: usize) -> usize {
    1 + (0..i.blocks()).filter(|&m| k + m >= i.n_prime[m]).count()
}

/// Compressed `ξ′` of length `len(ξ) − p`, with the partial sum identities re-checked.
pub fn compress(xi: &[Rational], i: &Interleaving) -> Result<Vec<Rational>, SynthesisError> {
    let p = i.blocks();
    if let Some(&last) = i.n_prime.last() {
        if last > xi.len() {
            return Err(SynthesisError::Internal("interleaving beyond data".into()));
        }
    }
    let len = xi.len() - p;
    let out: Vec<Rational> = (1..=len)
        .map(|k| {
            let m = block_of(i, k);
            if m <= p && k + m - 1 == i.n[m - 1] {
                term(xi, i.n[m - 1]) + term(xi, i.n_prime[m - 1])
            } else {
                term(xi, k + m - 1)
            }
        })
        .collect();
    let sx = cumulative(xi);
    let sc = cumulative(&out);
    for k in 1..=len {
        let m = block_of(i, k);
        let expect = if m > p {
            sx[k + p].clone()
        } else if k + m - 1 < i.n[m - 1] {
            sx[k + m - 1].clone()
        } else {
            term(xi, i.n_prime[m - 1]) + &sx[k + m - 1]
        };
        if sc[k] != expect || sc[k] < sx[k] {
            return Err(SynthesisError::Internal(format!("compression identity fails at {k}")));
        }
    }
    if out.windows(2).any(|w| w[0] < w[1]) {
        return Err(SynthesisError::Internal("compressed sequence not monotone".into()));
    }
    Ok(out)
}

/// One rotation per block on `(f_m, g_{N_m−(m−1)})`, where `g_k = k` and `f_m = k_len + m`.
pub fn decompression_plan(xi: &[Rational], i: &Interleaving, k_len: usize) -> Vec<RotationStep> {
    (1..=i.blocks())
        .filter_map(|m| {
            let (a, b) = (term(xi, i.n_prime[m - 1]), term(xi, i.n[m - 1]));
            let s = &a + &b;
            if s.is_zero() {
                return None;
            }
            Some(RotationStep::Givens { i: k_len + m, j: i.n[m - 1] + 1 - m, a2: a / &s, b2: b / s })
        })
        .collect()
}

/// Sorted index of `ξ` held at each position after decompression.
pub fn decompressed_positions(i: &Interleaving, k_len: usize) -> Vec<usize> {
    let p = i.blocks();
    let mut pos: Vec<usize> = (1..=k_len)
        .map(|k| {
            let m = block_of(i, k);
            if m <= p && k + m - 1 == i.n[m - 1] {
                i.n_prime[m - 1]
            } else {
                k + m - 1
            }
        })
        .collect();
    pos.extend(i.n.iter().copied());
    pos
}
