//! Inductive construction of `ξ` with `ξ ≺_∞ η` and `ξ ≼ η` when `liminf k η_k > 0`.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::families::gen_half_ampliation;
use super::{Family, Generated, GeneratorError};
use crate::numerics::rational::{format_rational, int, serde_rational, Cardinal, Rational};
use crate::numerics::sequence::{cumulative, Sequence};
use crate::relations::certificate::{AnalyticCertificate, CertifiedRelation as R, IndexRule};
use crate::relations::Status;

/// Indices are 1-based. `length` is `ℓ(ξ^{(k)}) = N_k + M_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongInftyBlock {
    pub k: usize,
    pub n: usize,
    pub n_prime: usize,
    pub m: usize,
    pub p: usize,
    pub length: usize,
    /// `Σ^{N_k} η − Σ ξ^{(k)}`
    #[serde(with = "serde_rational")]
    pub gap: Rational,
    /// `Σ η|_{N'_k−M_k}^{N'_k−1}`
    #[serde(with = "serde_rational")]
    pub window: Rational,
    /// `Σ^{N'_k−1} η − Σ^{N'_k−1} ξ^{(k)} η|_{N_k+1}^{N'_k−1}`
    #[serde(with = "serde_rational")]
    pub deficit: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongInftyChecks {
    pub nonincreasing: bool,
    pub interlacing: bool,
    pub last_term: bool,
    pub m_increasing: bool,
    pub m_at_least_k: bool,
    pub p_at_least_two: bool,
    pub gap: bool,
    pub window: bool,
    pub deficit: bool,
    pub prefix: bool,
    /// Number of `m` at which the prefix inequality was checked.
    pub prefix_checked: usize,
}

impl StrongInftyChecks {
    pub fn all(&self) -> bool {
        self.nonincreasing
            && self.interlacing
            && self.last_term
            && self.m_increasing
            && self.m_at_least_k
            && self.p_at_least_two
            && self.gap
            && self.window
            && self.deficit
            && self.prefix
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongInftyTrace {
    pub blocks: Vec<StrongInftyBlock>,
    pub checks: StrongInftyChecks,
}

struct Eta<'a> {
    t: &'a [Rational],
    s: Vec<Rational>,
}

impl Eta<'_> {
    fn at(&self, j: usize) -> &Rational {
        &self.t[j - 1]
    }
    fn sum(&self, a: usize, b: usize) -> Rational {
        if b < a {
            Rational::zero()
        } else {
            &self.s[b] - &self.s[a - 1]
        }
    }
}

/// Runs `blocks` steps of the construction with tolerances `eps[k−1]`.
///
/// When `liminf_positive` is false the half-ampliation of `η` already works
/// and is returned instead. The listed length of `η` is the index budget.
pub fn gen_strong_and_infty(
    eta: &Sequence,
    eps: &[Rational],
    blocks: usize,
    liminf_positive: bool,
) -> Result<Generated, GeneratorError> {
    if !liminf_positive {
        return gen_half_ampliation(eta, Some(false));
    }
    if !eta.is_monotone() || eta.terms().iter().any(|t| t <= &Rational::zero()) {
        return Err(GeneratorError::Rejected("eta must be decreasing and strictly positive".into()));
    }
    if eps.len() < blocks || eps.iter().any(|e| e <= &Rational::zero()) {
        return Err(GeneratorError::Rejected("need one positive epsilon per block".into()));
    }
    let e = Eta { t: eta.terms(), s: cumulative(eta.terms()) };
    let budget = e.t.len();
    let over = |j: usize, k: usize| if j > budget { Err(GeneratorError::Budget { budget, block: k }) } else { Ok(()) };
    let mut xi: Vec<Rational> = Vec::new();
    let mut out: Vec<StrongInftyBlock> = Vec::new();
    let mut prime_prev = 1usize;
    let mut n_prev = 0usize;
    for k in 1..=blocks {
        let target = e.at(prime_prev) / int(2);
        let n = (prime_prev + 1..=budget)
            .find(|&j| *e.at(j) <= target)
            .ok_or(GeneratorError::Budget { budget, block: k })?;
        let room = if k == 1 {
            e.at(1).clone()
        } else {
            &e.s[n_prev] + e.at(prime_prev) - xi.iter().sum::<Rational>()
        };
        let p = (room / e.at(n)).floor().to_integer().to_usize().unwrap_or(0);
        if k == 1 {
            xi.extend_from_slice(&e.t[1..n]);
        } else {
            xi.extend_from_slice(&e.t[n_prev..prime_prev - 1]);
            xi.extend_from_slice(&e.t[prime_prev..n]);
        }
        xi.extend(std::iter::repeat_n(e.at(n).clone(), p));
        let length = xi.len();
        let m = length - n;
        let mut np = length + 1;
        loop {
            over(np - 1, k)?;
            if np > m && e.sum(np - m, np - 1) < eps[k - 1] {
                break;
            }
            np += 1;
        }
        let gap = &e.s[n] - xi.iter().sum::<Rational>();
        let window = e.sum(np - m, np - 1);
        let mut ext = xi.clone();
        ext.extend_from_slice(&e.t[n..np - 1]);
        let deficit = &e.s[np - 1] - ext[..np - 1].iter().sum::<Rational>();
        out.push(StrongInftyBlock { k, n, n_prime: np, m, p, length, gap, window, deficit });
        n_prev = n;
        prime_prev = np;
    }
    let checks = check_trace(&e, &xi, &out, eps);
    let from = infinite_table(&out);
    let xi_seq = Sequence::truncated(xi, Some(e.at(n_prev).clone()))?
        .with_tail_positive(true)
        .declare_monotone()?;
    let certificates = vec![
        AnalyticCertificate::new(R::Majorize, Status::Holds, IndexRule::Fixed(1), "prefix bounds with M_k growing"),
        AnalyticCertificate::new(R::PMajorize, Status::Holds, IndexRule::Table(from), "Σ^{m+M_k}ξ ≤ Σ^m η for N_k < m ≤ N_{k+1}")
            .at_p(Cardinal::Infinite),
        AnalyticCertificate::new(R::StrongMajorize, Status::Holds, IndexRule::Fixed(1), "deficit below η_{N_k} + ε_k"),
    ];
    Ok(Generated {
        family: Family::Prop28,
        params: json!({
            "blocks": blocks,
            "eps": eps[..blocks].iter().map(format_rational).collect::<Vec<_>>(),
        }),
        xi: xi_seq,
        eta: eta.clone(),
        certificates,
        trace: Some(StrongInftyTrace { blocks: out, checks }),
    })
}

/// Start index for each `p ≤ M_K`: one past `N_k` for the first block with `M_k ≥ p`.
fn infinite_table(blocks: &[StrongInftyBlock]) -> Vec<usize> {
    let top = blocks.last().map_or(0, |b| b.m);
    (0..=top)
        .map(|p| if p == 0 { 1 } else { blocks.iter().find(|b| b.m >= p).map_or(1, |b| b.n + 1) })
        .collect()
}

fn check_trace(e: &Eta, xi: &[Rational], blocks: &[StrongInftyBlock], eps: &[Rational]) -> StrongInftyChecks {
    let sx = cumulative(xi);
    let mut prev_prime = 1;
    let mut c = StrongInftyChecks {
        nonincreasing: xi.windows(2).all(|w| w[0] >= w[1]),
        interlacing: true,
        last_term: true,
        m_increasing: blocks.windows(2).all(|w| w[0].m < w[1].m),
        m_at_least_k: blocks.iter().all(|b| b.m >= b.k),
        p_at_least_two: blocks.iter().all(|b| b.p >= 2),
        gap: true,
        window: true,
        deficit: true,
        prefix: true,
        prefix_checked: 0,
    };
    for b in blocks {
        let zero = Rational::zero();
        c.interlacing &= prev_prime < b.n && b.n < b.length && b.length < b.n_prime;
        c.last_term &= xi[b.length - 1] == *e.at(b.n);
        c.gap &= zero <= b.gap && b.gap < *e.at(b.n);
        c.window &= b.window < eps[b.k - 1];
        c.deficit &= zero <= b.deficit && b.deficit < e.at(b.n) + &eps[b.k - 1];
        prev_prime = b.n_prime;
    }
    if let Some(first) = blocks.first() {
        for m in 1..=first.n {
            c.prefix &= sx[m] <= e.s[m];
            c.prefix_checked += 1;
        }
    }
    for w in blocks.windows(2) {
        for m in w[0].n + 1..=w[1].n {
            c.prefix &= sx[m + w[0].m] <= e.s[m];
            c.prefix_checked += 1;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::BaseFamily;
    use crate::numerics::rational::{pow2_inv, rat};

    fn eps(k: usize) -> Vec<Rational> {
        (1..=k as u32).map(pow2_inv).collect()
    }

    #[test]
    fn harmonic_base_case() {
        let eta = BaseFamily::Harmonic.sequence(64);
        let g = gen_strong_and_infty(&eta, &eps(2), 2, true).unwrap();
        let t = g.trace.as_ref().unwrap();
        let b = &t.blocks[0];
        assert_eq!((b.n, b.p, b.m, b.length), (2, 2, 1, 3));
        assert_eq!(&g.xi.terms()[..3], &[rat(1, 2), rat(1, 2), rat(1, 2)]);
        assert!(b.gap.is_zero());
        assert!(t.checks.all());
    }

    #[test]
    fn six_blocks_confirmed() {
        let eta = BaseFamily::Harmonic.sequence(1024);
        let g = gen_strong_and_infty(&eta, &eps(6), 6, true).unwrap();
        let t = g.trace.as_ref().unwrap();
        assert!(t.checks.all(), "{:?}", t.checks);
        assert_eq!(t.blocks.len(), 6);
        g.confirm(512).unwrap();
    }

    #[test]
    fn budget_and_branches() {
        let eta = BaseFamily::Harmonic.sequence(20);
        assert!(matches!(gen_strong_and_infty(&eta, &eps(6), 6, true), Err(GeneratorError::Budget { .. })));
        let g = gen_strong_and_infty(&BaseFamily::Geometric.sequence(32), &eps(2), 2, false).unwrap();
        assert_eq!(g.family, Family::HalfAmpliation);
    }
}
