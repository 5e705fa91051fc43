//! Analytic facts about infinite sequences that finite data cannot decide.
//!
//! Generators attach these to the sequences they build. Relation checks
//! consult them for statements about unlisted indices and verify them
//! against every listed index before trusting them.

use serde::{Deserialize, Serialize};

use super::verdict::Status;
use crate::numerics::rational::{ceil_log2, serde_rational, Cardinal, Rational};
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifiedRelation {
    Majorize,
    StrongMajorize,
    PMajorize,
    ApproxPMajorize,
}

/// Where the eventual inequality starts, possibly depending on `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexRule {
    Fixed(usize),
    /// `N = p + offset`.
    PlusP(usize),
    /// `N = table[p]`; larger `p` hold from an index beyond the listed data.
    Table(Vec<usize>),
}

/// Start index of a claim that holds only beyond the listed data.
pub const BEYOND: usize = usize::MAX;

impl IndexRule {
    pub fn at(&self, p: usize) -> usize {
        match self {
            IndexRule::Fixed(n) => *n,
            IndexRule::PlusP(k) => p.saturating_add(*k),
            IndexRule::Table(t) => t.get(p).copied().unwrap_or(BEYOND),
        }
    }
}

/// Dependence of `N_{p,ε}` on `ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsRule {
    /// `N(ε) = max(floor, ⌈log₂(1/ε)⌉ + offset)`, valid for every `ε > 0`.
    Log2 { offset: i64, floor: usize },
    /// Holds from the certificate's index for `ε >= threshold`, fails below.
    Threshold {
        #[serde(with = "serde_rational")]
        holds_at_or_above: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticCertificate {
    pub relation: CertifiedRelation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Cardinal>,
    pub status: Status,
    pub from: IndexRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<EpsRule>,
    pub reason: String,
}

/// What a certificate says about one concrete check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    /// The inequality holds for every `n >= from`.
    HoldsFrom(usize),
    /// No starting index works.
    Fails,
}

impl AnalyticCertificate {
    pub fn new(relation: CertifiedRelation, status: Status, from: IndexRule, reason: impl Into<String>) -> Self {
        AnalyticCertificate {
            relation,
            p: None,
            status,
            from,
            eps: None,
            reason: reason.into(),
        }
    }

    pub fn at_p(mut self, p: impl Into<Cardinal>) -> Self {
        self.p = Some(p.into());
        self
    }

    pub fn with_eps(mut self, rule: EpsRule) -> Self {
        self.eps = Some(rule);
        self
    }

    fn p_or_zero(&self) -> Cardinal {
        self.p.unwrap_or(Cardinal::Finite(0))
    }

    /// The claim this certificate makes about `relation` at parameter `p`
    /// (and `ε` for the approximate relation), if any.
    ///
    /// A holding statement at `p_c >= p` implies the statement at `p`;
    /// a failing statement at `p_c <= p` implies failure at `p`.
    pub fn claim(&self, relation: CertifiedRelation, p: Cardinal, eps: Option<&Rational>) -> Option<Claim> {
        if self.relation != relation {
            return None;
        }
        let pc = self.p_or_zero();
        let index_at = |p: Cardinal| match (p, pc) {
            (Cardinal::Finite(q), Cardinal::Infinite) => self.from.at(q),
            (_, Cardinal::Finite(c)) => self.from.at(c),
            (Cardinal::Infinite, Cardinal::Infinite) => self.from.at(0),
        };
        match relation {
            CertifiedRelation::ApproxPMajorize => {
                let eps = eps?;
                match &self.eps {
                    None | Some(EpsRule::Log2 { .. }) if self.status == Status::Holds => {
                        if pc < p {
                            return None;
                        }
                        let base = index_at(p);
                        Some(Claim::HoldsFrom(match &self.eps {
                            Some(EpsRule::Log2 { offset, floor }) => log2_index(eps, *offset, *floor),
                            _ => base,
                        }))
                    }
                    Some(EpsRule::Threshold { holds_at_or_above }) => {
                        if eps >= holds_at_or_above {
                            (pc >= p).then(|| Claim::HoldsFrom(index_at(p)))
                        } else {
                            (pc <= p).then_some(Claim::Fails)
                        }
                    }
                    _ => (self.status == Status::Fails && pc <= p).then_some(Claim::Fails),
                }
            }
            _ => match self.status {
                Status::Holds if pc >= p => Some(Claim::HoldsFrom(index_at(p))),
                Status::Fails if pc <= p => Some(Claim::Fails),
                _ => None,
            },
        }
    }

    /// Whether the statement covers every `ε > 0` (the approximate relation
    /// proper); `Some(false)` when it asserts failure for some `ε`.
    pub fn all_eps(&self) -> Option<bool> {
        match (&self.eps, self.status) {
            (Some(EpsRule::Threshold { holds_at_or_above }), _) => Some(holds_at_or_above.is_zero()),
            (_, Status::Holds) => Some(true),
            (_, Status::Fails) => Some(false),
            _ => None,
        }
    }
}

/// `max(floor, ⌈log₂(1/ε)⌉ + offset)`, never below 1.
pub fn log2_index(eps: &Rational, offset: i64, floor: usize) -> usize {
    let c = ceil_log2(&(Rational::one() / eps)) + offset;
    (c.max(0) as usize).max(floor).max(1)
}

/// The first applicable claim among `certs`, with the certificate's reason.
pub fn lookup<'a>(
    certs: &'a [AnalyticCertificate],
    relation: CertifiedRelation,
    p: Cardinal,
    eps: Option<&Rational>,
) -> Option<(Claim, &'a AnalyticCertificate)> {
    certs.iter().find_map(|c| c.claim(relation, p, eps).map(|claim| (claim, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{pow2_inv, rat};

    #[test]
    fn log2_rule() {
        // N = ⌈log₂(1/ε)⌉ - 1 with floor 1
        assert_eq!(log2_index(&rat(1, 8), -1, 1), 2);
        assert_eq!(log2_index(&rat(1, 2), -1, 1), 1);
        assert_eq!(log2_index(&rat(3, 1), -1, 1), 1);
        assert_eq!(log2_index(&pow2_inv(20), -1, 1), 19);
        assert_eq!(log2_index(&rat(1, 5), 0, 2), 3);
    }

    #[test]
    fn monotone_in_p() {
        let holds = AnalyticCertificate::new(CertifiedRelation::PMajorize, Status::Holds, IndexRule::PlusP(0), "t")
            .at_p(Cardinal::Infinite);
        assert_eq!(
            holds.claim(CertifiedRelation::PMajorize, Cardinal::Finite(5), None),
            Some(Claim::HoldsFrom(5))
        );
        let fails = AnalyticCertificate::new(CertifiedRelation::PMajorize, Status::Fails, IndexRule::Fixed(1), "t")
            .at_p(2usize);
        assert_eq!(fails.claim(CertifiedRelation::PMajorize, Cardinal::Finite(1), None), None);
        assert_eq!(
            fails.claim(CertifiedRelation::PMajorize, Cardinal::Infinite, None),
            Some(Claim::Fails)
        );
        assert_eq!(fails.claim(CertifiedRelation::Majorize, Cardinal::Finite(3), None), None);
    }

    #[test]
    fn threshold_rule() {
        let c = AnalyticCertificate::new(CertifiedRelation::ApproxPMajorize, Status::Fails, IndexRule::Fixed(3), "t")
            .at_p(2usize)
            .with_eps(EpsRule::Threshold { holds_at_or_above: rat(1, 1) });
        let at = |e| c.claim(CertifiedRelation::ApproxPMajorize, Cardinal::Finite(2), Some(&e));
        assert_eq!(at(rat(1, 2)), Some(Claim::Fails));
        assert_eq!(at(rat(1, 1)), Some(Claim::HoldsFrom(3)));
        assert_eq!(c.all_eps(), Some(false));
    }

    #[test]
    fn json_round_trip() {
        let c = AnalyticCertificate::new(CertifiedRelation::ApproxPMajorize, Status::Holds, IndexRule::Fixed(2), "closed form")
            .at_p(1usize)
            .with_eps(EpsRule::Log2 { offset: -1, floor: 1 });
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<AnalyticCertificate>(&s).unwrap(), c);
    }
}
