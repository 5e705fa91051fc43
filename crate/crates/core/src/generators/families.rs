//! Closed-form families.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Family, Generated, GeneratorError};
use crate::numerics::rational::{format_rational, int, pow2_inv, serde_rational, Cardinal, Rational};
use crate::numerics::sequence::{cumulative, zero_count_gap, Sequence, SequenceKind};
use crate::relations::certificate::{AnalyticCertificate, CertifiedRelation as R, EpsRule, IndexRule};
use crate::relations::Status;

/// Registered base sequences `η`, all strictly positive and decreasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseFamily {
    /// `2^{1−k}`
    Geometric,
    /// `1/k`
    Harmonic,
    /// `1/(k ⌈log₂(k+1)⌉)`, a rational stand-in with `k η_k → 0` and `η ∉ ℓ¹`.
    LogHarmonic,
}

impl BaseFamily {
    pub const ALL: [BaseFamily; 3] = [BaseFamily::Geometric, BaseFamily::Harmonic, BaseFamily::LogHarmonic];

    pub fn term(self, k: usize) -> Rational {
        match self {
            BaseFamily::Geometric => pow2_inv(k as u32 - 1),
            BaseFamily::Harmonic => Rational::new(BigInt::one(), BigInt::from(k)),
            BaseFamily::LogHarmonic => {
                // ⌈log₂(k+1)⌉ is the bit length of k
                let bits = (usize::BITS - k.leading_zeros()) as usize;
                Rational::new(BigInt::one(), BigInt::from(k * bits))
            }
        }
    }

    /// Whether `liminf k η_k > 0`.
    pub fn liminf_positive(self) -> bool {
        matches!(self, BaseFamily::Harmonic)
    }

    /// The first `len` terms, declared monotone with a positive tail.
    pub fn sequence(self, len: usize) -> Sequence {
        Sequence::truncated((1..=len).map(|k| self.term(k)).collect(), Some(self.term(len + 1)))
            .and_then(|s| s.with_tail_positive(true).declare_monotone())
            .expect("registered families are decreasing")
    }
}

impl FromStr for BaseFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "geometric" => Ok(BaseFamily::Geometric),
            "harmonic" => Ok(BaseFamily::Harmonic),
            "log-harmonic" => Ok(BaseFamily::LogHarmonic),
            other => Err(format!("unknown base family {other:?}")),
        }
    }
}

fn truncated_like(model: &Sequence, terms: Vec<Rational>, tail: Option<Rational>) -> Result<Sequence, GeneratorError> {
    Ok(match model.kind() {
        SequenceKind::FinitelySupported => Sequence::finite(terms)?,
        SequenceKind::Truncated => Sequence::truncated(terms, tail)?.with_tail_positive(model.tail_positive()),
    })
}

fn strictly_positive(eta: &Sequence) -> bool {
    !eta.is_finite() && eta.tail_positive() && eta.terms().iter().all(|t| *t > Rational::zero())
}

/// `ξ^{(p)} = ⟨η₁/p, …, η₁/p, η₂, η₃, …⟩` with `p` copies of `η₁/p`:
/// `ξ^{(p)} ≺_{p−1} η` but not `≺_p`.
pub fn gen_p_gap(eta: &Sequence, p: usize) -> Result<Generated, GeneratorError> {
    if p == 0 {
        return Err(GeneratorError::Rejected("p must be at least 1".into()));
    }
    if !strictly_positive(eta) || !eta.is_monotone() || eta.is_empty() {
        return Err(GeneratorError::Rejected("eta must be decreasing and strictly positive".into()));
    }
    let t = eta.terms();
    let split = &t[0] / int(p as i64);
    if eta.tail_bound().is_some_and(|b| *b > split) {
        return Err(GeneratorError::Rejected("listing too short to place the split block".into()));
    }
    // η_k above η₁/p sort ahead of the split block
    let ahead = t[1..].iter().filter(|x| **x > split).count();
    let mut terms = vec![split; p];
    terms.extend_from_slice(&t[1..]);
    let xi = truncated_like(eta, terms, eta.tail_bound().cloned())?;
    let mut certificates = vec![AnalyticCertificate::new(
        R::Majorize,
        Status::Holds,
        IndexRule::Fixed(1),
        "splitting eta_1 into equal parts",
    )];
    if p >= 2 {
        certificates.push(
            AnalyticCertificate::new(R::PMajorize, Status::Holds, IndexRule::Fixed(ahead + 1), "Σ^{n+p-1}ξ = Σ^n η")
                .at_p(p - 1),
        );
    }
    certificates.push(
        AnalyticCertificate::new(R::PMajorize, Status::Fails, IndexRule::Fixed(1), "Σ^{n+p}ξ − Σ^n η = η_{n+1} > 0")
            .at_p(p),
    );
    Ok(Generated {
        family: Family::PGap,
        params: json!({ "p": p }),
        xi,
        eta: eta.clone(),
        certificates,
        trace: None,
    })
}

/// `ξ = ½ D₂ η`, which satisfies `ξ ≺_∞ η` with `N_p = p`.
///
/// `liminf_positive` records whether `liminf k η_k > 0`; when known it decides
/// strong majorization.
pub fn gen_half_ampliation(eta: &Sequence, liminf_positive: Option<bool>) -> Result<Generated, GeneratorError> {
    if !eta.is_monotone() {
        return Err(GeneratorError::Rejected("eta must be decreasing".into()));
    }
    let half = |x: &Rational| x / int(2);
    let terms: Vec<Rational> = eta.terms().iter().flat_map(|x| [half(x), half(x)]).collect();
    let mut xi = truncated_like(eta, terms, eta.tail_bound().map(half))?;
    if eta.is_finite() {
        xi = Sequence::finite(xi.terms().to_vec())?;
    }
    let mut certificates = Vec::new();
    if !eta.is_finite() {
        certificates.push(AnalyticCertificate::new(R::Majorize, Status::Holds, IndexRule::Fixed(1), "half-ampliation"));
        certificates.push(
            AnalyticCertificate::new(R::PMajorize, Status::Holds, IndexRule::PlusP(0), "N_p = p").at_p(Cardinal::Infinite),
        );
        match liminf_positive {
            Some(true) => certificates.push(AnalyticCertificate::new(
                R::StrongMajorize,
                Status::Fails,
                IndexRule::Fixed(1),
                "⌊k/2⌋η_k ≤ Σ^k(η−ξ) and liminf kη_k > 0",
            )),
            Some(false) => certificates.push(AnalyticCertificate::new(
                R::StrongMajorize,
                Status::Holds,
                IndexRule::Fixed(1),
                "Σ^k(η−ξ) ≤ ⌈k/2⌉η_{⌈k/2⌉} and liminf kη_k = 0",
            )),
            None => {}
        }
    }
    Ok(Generated {
        family: Family::HalfAmpliation,
        params: json!({ "liminf_positive": liminf_positive }),
        xi,
        eta: eta.clone(),
        certificates,
        trace: None,
    })
}

/// One row of the half-ampliation bounds `⌊k/2⌋η_k ≤ Σ^k(η−ξ) ≤ ⌈k/2⌉η_{⌈k/2⌉}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sandwich {
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub lower: Rational,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    #[serde(with = "serde_rational")]
    pub upper: Rational,
}

impl Sandwich {
    pub fn holds(&self) -> bool {
        self.lower <= self.value && self.value <= self.upper
    }
}

pub fn half_ampliation_sandwich(eta: &[Rational], k_max: usize) -> Vec<Sandwich> {
    let xi: Vec<Rational> = eta.iter().flat_map(|x| [x / int(2), x / int(2)]).collect();
    let (se, sx) = (cumulative(eta), cumulative(&xi));
    (1..=k_max.min(eta.len()))
        .map(|k| Sandwich {
            k,
            lower: int((k / 2) as i64) * &eta[k - 1],
            value: &se[k] - &sx[k],
            upper: int(k.div_ceil(2) as i64) * &eta[k.div_ceil(2) - 1],
        })
        .collect()
}

fn quartic_term(k: usize) -> Rational {
    let one = BigInt::one();
    Rational::new((&one << (k + 1)) - 3, &one << (2 * k))
}

/// `ξ_k = (2^{k+1}−3)/4^k` against `η_k = 2^{−k}`: `≾_1` but not `≺_1`.
///
/// For `p ≥ 2` both sequences get a prefix (`p` ones before `ξ`, the single
/// term `p` before `η`), shifting the base margins by `p` indices so that
/// `ξ^{(p)} ≾_p η^{(p)}` but not `≺_p`.
pub fn gen_app_gap(p: usize, len: usize) -> Result<Generated, GeneratorError> {
    if p == 0 {
        return Err(GeneratorError::Rejected("p must be at least 1".into()));
    }
    let xi_base: Vec<Rational> = (1..=len).map(quartic_term).collect();
    let eta_base: Vec<Rational> = (1..=len).map(|k| pow2_inv(k as u32)).collect();
    let (xi_terms, eta_terms, certificates) = if p == 1 {
        let certs = vec![
            AnalyticCertificate::new(R::Majorize, Status::Holds, IndexRule::Fixed(1), "Σ^nξ = 1−2^{1−n}+4^{−n}"),
            AnalyticCertificate::new(R::PMajorize, Status::Fails, IndexRule::Fixed(1), "Σ^{n+1}ξ − Σ^nη = 4^{−n−1}")
                .at_p(1usize),
            AnalyticCertificate::new(R::ApproxPMajorize, Status::Holds, IndexRule::Fixed(1), "4^{−n−1} ≤ ε 2^{−n−1}")
                .at_p(1usize)
                .with_eps(EpsRule::Log2 { offset: -1, floor: 1 }),
        ];
        (xi_base, eta_base, certs)
    } else {
        let mut x = vec![int(1); p];
        x.extend(xi_base);
        let mut e = vec![int(p as i64)];
        e.extend(eta_base);
        let certs = vec![
            AnalyticCertificate::new(R::Majorize, Status::Holds, IndexRule::Fixed(1), "both totals are p + 1"),
            AnalyticCertificate::new(R::PMajorize, Status::Holds, IndexRule::Fixed(1), "Σ^{n+p-1}ξ − Σ^nη = Σ^{n-1}(ξ−η)")
                .at_p(p - 1),
            AnalyticCertificate::new(R::PMajorize, Status::Fails, IndexRule::Fixed(1), "Σ^{n+p}ξ − Σ^nη = 4^{−n}")
                .at_p(p),
            AnalyticCertificate::new(R::ApproxPMajorize, Status::Holds, IndexRule::Fixed(2), "4^{−n} ≤ ε 2^{−n}")
                .at_p(p)
                .with_eps(EpsRule::Log2 { offset: 0, floor: 2 }),
        ];
        (x, e, certs)
    };
    let xi = Sequence::truncated(xi_terms, Some(quartic_term(len + 1)))?.with_tail_positive(true);
    let eta = Sequence::truncated(eta_terms, Some(pow2_inv(len as u32 + 1)))?
        .with_tail_positive(true)
        .declare_monotone()?;
    Ok(Generated { family: Family::AppGap, params: json!({ "p": p, "len": len }), xi, eta, certificates, trace: None })
}

/// `φ = λξ + (1−λ)ζ` and `r = min{p + |ξ⁻¹(0)∖ζ⁻¹(0)|, q + |ζ⁻¹(0)∖ξ⁻¹(0)|}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexMix {
    pub phi: Sequence,
    pub r: Cardinal,
    pub certificate: AnalyticCertificate,
}

pub fn convex_mix(xi: &Sequence, zeta: &Sequence, lambda: &Rational, p: Cardinal, q: Cardinal) -> Result<ConvexMix, GeneratorError> {
    if *lambda <= Rational::zero() || *lambda >= Rational::one() {
        return Err(GeneratorError::Rejected(format!("lambda = {} is not in (0, 1)", format_rational(lambda))));
    }
    if xi.kind() != zeta.kind() {
        return Err(GeneratorError::Rejected("mixing a finite with a truncated sequence".into()));
    }
    let n = xi.len().max(zeta.len());
    if !xi.is_finite() && xi.len() != zeta.len() {
        return Err(GeneratorError::Rejected("truncated inputs must list the same length".into()));
    }
    let mu = Rational::one() - lambda;
    let terms: Vec<Rational> = xi.padded(n).iter().zip(zeta.padded(n)).map(|(a, b)| lambda * a + &mu * b).collect();
    let phi = if xi.is_finite() {
        Sequence::finite(terms)?
    } else {
        let tail = match (xi.tail_bound(), zeta.tail_bound()) {
            (Some(a), Some(b)) => Some(lambda * a + &mu * b),
            _ => None,
        };
        Sequence::truncated(terms, tail)?.with_tail_positive(xi.tail_positive() || zeta.tail_positive())
    };
    let r = p
        .saturating_add(zero_count_gap(xi, zeta)?)
        .min(q.saturating_add(zero_count_gap(zeta, xi)?));
    let certificate =
        AnalyticCertificate::new(R::ApproxPMajorize, Status::Holds, IndexRule::Fixed(1), "convex combination").at_p(r);
    Ok(ConvexMix { phi, r, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;
    use crate::relations::{Checker, Status};

    #[test]
    fn base_families() {
        assert_eq!(BaseFamily::Geometric.term(1), int(1));
        assert_eq!(BaseFamily::Harmonic.term(4), rat(1, 4));
        // ⌈log₂ 2⌉ = 1, ⌈log₂ 4⌉ = 2, ⌈log₂ 5⌉ = 3
        assert_eq!(BaseFamily::LogHarmonic.term(1), int(1));
        assert_eq!(BaseFamily::LogHarmonic.term(3), rat(1, 6));
        assert_eq!(BaseFamily::LogHarmonic.term(4), rat(1, 12));
        assert_eq!(BaseFamily::LogHarmonic.term(7), rat(1, 21));
        let s = BaseFamily::LogHarmonic.sequence(300);
        assert!(s.terms().windows(2).all(|w| w[0] > w[1]));
        assert_eq!("log-harmonic".parse::<BaseFamily>().unwrap(), BaseFamily::LogHarmonic);
    }

    #[test]
    fn p_gap_geometric() {
        let eta = BaseFamily::Geometric.sequence(64);
        let g = gen_p_gap(&eta, 2).unwrap();
        assert_eq!(&g.xi.terms()[..4], &[rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 4)]);
        let v = g.confirm(512).unwrap();
        assert!(v.iter().all(|v| v.status != Status::Unknown));
        let c = g.checker(512);
        let fails = c.p_majorize(&g.xi, &g.eta, Cardinal::Finite(2)).unwrap();
        assert_eq!(fails.witness, Some(1));
        assert!(c.p_majorize(&g.xi, &g.eta, Cardinal::Finite(1)).unwrap().margin_trace.iter().all(Zero::is_zero));
        let g1 = gen_p_gap(&eta, 1).unwrap();
        assert_eq!(g1.xi.terms(), eta.terms());
        g1.confirm(512).unwrap();
        let g3 = gen_p_gap(&eta, 3).unwrap();
        g3.confirm(512).unwrap();
        assert!(matches!(gen_p_gap(&eta, 0), Err(GeneratorError::Rejected(_))));
        let fin = Sequence::finite(vec![int(1), int(0)]).unwrap();
        assert!(matches!(gen_p_gap(&fin, 2), Err(GeneratorError::Rejected(_))));
    }

    #[test]
    fn half_ampliation_examples() {
        let eta: Vec<Rational> = (1..=4).map(|k| rat(1, k)).collect();
        let s = half_ampliation_sandwich(&eta, 4);
        assert_eq!((s[3].lower.clone(), s[3].value.clone(), s[3].upper.clone()), (rat(1, 2), rat(7, 12), int(1)));
        assert!(s.iter().all(Sandwich::holds));
        for fam in BaseFamily::ALL {
            let g = gen_half_ampliation(&fam.sequence(128), Some(fam.liminf_positive())).unwrap();
            g.confirm(256).unwrap();
        }
        let zero = Sequence::finite(vec![int(0), int(0)]).unwrap();
        let g = gen_half_ampliation(&zero, None).unwrap();
        assert!(g.certificates.is_empty());
        let c = Checker::new(64);
        assert!(c.strong_majorize(&g.xi, &g.eta).unwrap().holds());
        assert_eq!(c.p_majorize(&g.xi, &g.eta, Cardinal::Infinite).unwrap().status, Status::Holds);
    }

    #[test]
    fn app_gap_pairs() {
        let g = gen_app_gap(1, 60).unwrap();
        g.confirm(512).unwrap();
        let c = g.checker(512);
        let a = c.approx_p_majorize(&g.xi, &g.eta, Cardinal::Finite(1), &rat(1, 8)).unwrap();
        assert_eq!(a.witness, Some(2));
        for p in 2..5 {
            let g = gen_app_gap(p, 60).unwrap();
            g.confirm(512).unwrap();
            let c = g.checker(512);
            assert_eq!(c.p_majorize(&g.xi, &g.eta, Cardinal::Finite(p)).unwrap().status, Status::Fails);
            let a = c.approx_p_majorize(&g.xi, &g.eta, Cardinal::Finite(p), &pow2_inv(10)).unwrap();
            assert_eq!(a.status, Status::Holds);
        }
    }

    #[test]
    fn convex_mix_example() {
        let xi = Sequence::finite(vec![int(2), int(2), int(0), int(0)]).unwrap();
        let zeta = Sequence::finite(vec![rat(4, 3), rat(4, 3), rat(4, 3), int(0)]).unwrap();
        let m = convex_mix(&xi, &zeta, &rat(1, 2), 0.into(), 0.into()).unwrap();
        assert_eq!(m.r, Cardinal::Finite(0));
        assert_eq!(m.phi.terms(), &[rat(5, 3), rat(5, 3), rat(2, 3), int(0)]);
        let v = Checker::new(64).majorize(&m.phi, &xi).unwrap();
        assert!(v.holds());
        assert_eq!(v.margin_trace, vec![rat(1, 3), rat(2, 3), int(0), int(0)]);
        let same = convex_mix(&xi, &xi, &rat(1, 3), 2.into(), 5.into()).unwrap();
        assert_eq!((same.phi.terms(), same.r), (xi.terms(), Cardinal::Finite(2)));
        assert!(convex_mix(&xi, &zeta, &int(1), 0.into(), 0.into()).is_err());
        assert!(convex_mix(&xi, &zeta, &int(0), 0.into(), 0.into()).is_err());
    }
}
