//! Decision procedures for majorization, strong majorization,
//! p-majorization and approximate p-majorization.
//!
//! Every relation is evaluated on the decreasing rearrangements `ξ*` and
//! `η*`. Finitely supported inputs are decided exactly. For truncated
//! inputs a violation inside the listed data is definitive for the
//! prefix relation; statements about unlisted indices need an
//! [`AnalyticCertificate`], otherwise the verdict is `Unknown`.

pub mod certificate;
pub mod hierarchy;
pub mod verdict;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numerics::rational::{format_rational, Cardinal, Rational};
use crate::numerics::sequence::{cumulative, monotonize, Sequence, SequenceError};

pub use certificate::{AnalyticCertificate, CertifiedRelation, Claim, EpsRule, IndexRule};
pub use hierarchy::{hierarchy_check, Edge, EdgeOutcome, HierarchyReport};
pub use verdict::{Relation, Status, Verdict};

pub const DEFAULT_HORIZON: usize = 512;
pub const DEFAULT_P_BOUND: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("certificate \"{reason}\" for {relation} is contradicted by the data at n = {n}")]
    CertificateContradiction { relation: String, reason: String, n: usize },
}

/// Monotonized data shared by all checks on one pair.
#[derive(Debug, Clone)]
pub struct Pair {
    xs: Vec<Rational>,
    es: Vec<Rational>,
    xc: Vec<Rational>,
    ec: Vec<Rational>,
    x_fin: bool,
    e_fin: bool,
    x_tail_sum: Option<Rational>,
    e_tail_sum: Option<Rational>,
    zero: Rational,
    notes: Vec<String>,
}

impl Pair {
    pub fn new(xi: &Sequence, eta: &Sequence) -> Self {
        let xm = monotonize(xi);
        let em = monotonize(eta);
        let mut notes = Vec::new();
        for (name, s, m) in [("xi", xi, &xm), ("eta", eta, &em)] {
            if s.terms().iter().take(m.len()).ne(m.terms().iter()) {
                notes.push(format!("listed order of {name} differs from its decreasing rearrangement"));
            }
            if !s.is_finite() && m.len() < s.len() {
                notes.push(format!(
                    "{} listed terms of {name} are not certified to precede the tail",
                    s.len() - m.len()
                ));
            }
        }
        Pair {
            xc: cumulative(xm.terms()),
            ec: cumulative(em.terms()),
            xs: xm.terms().to_vec(),
            es: em.terms().to_vec(),
            x_fin: xi.is_finite(),
            e_fin: eta.is_finite(),
            x_tail_sum: xm.tail_sum_bound().cloned(),
            e_tail_sum: em.tail_sum_bound().cloned(),
            zero: Rational::zero(),
            notes,
        }
    }

    pub fn xi_star(&self) -> &[Rational] {
        &self.xs
    }

    pub fn eta_star(&self) -> &[Rational] {
        &self.es
    }

    pub fn both_finite(&self) -> bool {
        self.x_fin && self.e_fin
    }

    fn xsum(&self, m: usize) -> Option<&Rational> {
        match self.xc.get(m) {
            Some(s) => Some(s),
            None if self.x_fin => self.xc.last(),
            None => None,
        }
    }

    fn esum(&self, n: usize) -> Option<&Rational> {
        match self.ec.get(n) {
            Some(s) => Some(s),
            None if self.e_fin => self.ec.last(),
            None => None,
        }
    }

    fn eterm(&self, k: usize) -> Option<&Rational> {
        match self.es.get(k - 1) {
            Some(t) => Some(t),
            None if self.e_fin => Some(&self.zero),
            None => None,
        }
    }

    /// `Σ^n η* + ε η*_{n+1} − Σ^{n+p} ξ*`.
    pub fn slack(&self, n: usize, p: usize, eps: Option<&Rational>) -> Option<Rational> {
        let mut s = self.esum(n)?.clone();
        if let Some(e) = eps {
            s += e * self.eterm(n + 1)?;
        }
        Some(s - self.xsum(n.saturating_add(p))?)
    }

    /// Last `n` at which the inequality can be evaluated. For two finitely
    /// supported sequences every later `n` has the same slack.
    fn end(&self, p: usize, approx: bool, horizon: usize) -> usize {
        if self.both_finite() {
            return self.xs.len().max(self.es.len()) + 1;
        }
        let mut end = horizon;
        if !self.x_fin {
            end = end.min(self.xs.len().saturating_sub(p));
        }
        if !self.e_fin {
            end = end.min(self.es.len().saturating_sub(approx as usize));
        }
        end
    }

    fn trace(&self, p: usize, eps: Option<&Rational>, end: usize) -> Vec<Rational> {
        (1..=end)
            .map(|n| self.slack(n, p, eps).expect("index within evaluable range"))
            .collect()
    }

    fn total_interval(&self, fin: bool, cum: &[Rational], tail: &Option<Rational>) -> (Rational, Option<Rational>) {
        let lo = cum.last().cloned().unwrap_or_default();
        let hi = if fin { Some(lo.clone()) } else { tail.as_ref().map(|t| &lo + t) };
        (lo, hi)
    }
}

fn certified(mut v: Verdict, cert: &AnalyticCertificate) -> Verdict {
    v.certified_by = Some(cert.reason.clone());
    v
}

/// Relation checker carrying the horizon, the bound used for `p = ∞`
/// and the analytic certificates available for the inputs.
#[derive(Debug, Clone)]
pub struct Checker {
    pub horizon: usize,
    pub p_bound: usize,
    pub certificates: Vec<AnalyticCertificate>,
}

impl Default for Checker {
    fn default() -> Self {
        Checker::new(DEFAULT_HORIZON)
    }
}

impl Checker {
    pub fn new(horizon: usize) -> Self {
        Checker {
            horizon,
            p_bound: DEFAULT_P_BOUND,
            certificates: Vec::new(),
        }
    }

    pub fn with_certificates(mut self, certs: Vec<AnalyticCertificate>) -> Self {
        self.certificates = certs;
        self
    }

    pub fn with_p_bound(mut self, p_bound: usize) -> Self {
        self.p_bound = p_bound;
        self
    }

    fn lookup(&self, rel: CertifiedRelation, p: Cardinal, eps: Option<&Rational>) -> Option<(Claim, &AnalyticCertificate)> {
        certificate::lookup(&self.certificates, rel, p, eps)
    }

    pub fn majorize(&self, xi: &Sequence, eta: &Sequence) -> Result<Verdict, RelationError> {
        self.majorize_pair(&Pair::new(xi, eta))
    }

    pub fn strong_majorize(&self, xi: &Sequence, eta: &Sequence) -> Result<Verdict, RelationError> {
        let pair = Pair::new(xi, eta);
        let m = self.majorize_pair(&pair)?;
        self.strong_pair(&pair, &m)
    }

    pub fn p_majorize(&self, xi: &Sequence, eta: &Sequence, p: Cardinal) -> Result<Verdict, RelationError> {
        let pair = Pair::new(xi, eta);
        let m = self.majorize_pair(&pair)?;
        self.shifted_pair(&pair, &m, p, None)
    }

    pub fn approx_p_majorize(
        &self,
        xi: &Sequence,
        eta: &Sequence,
        p: Cardinal,
        eps: &Rational,
    ) -> Result<Verdict, RelationError> {
        let pair = Pair::new(xi, eta);
        let m = self.majorize_pair(&pair)?;
        self.shifted_pair(&pair, &m, p, Some(eps))
    }

    /// `N_{p,ε}` over a grid of `ε` values, plus the status of the
    /// statement for every `ε > 0`.
    pub fn approx_curve(
        &self,
        xi: &Sequence,
        eta: &Sequence,
        p: Cardinal,
        grid: &[Rational],
    ) -> Result<EpsCurve, RelationError> {
        let pair = Pair::new(xi, eta);
        let m = self.majorize_pair(&pair)?;
        self.curve_pair(&pair, &m, p, grid)
    }

    pub fn majorize_pair(&self, pair: &Pair) -> Result<Verdict, RelationError> {
        let end = if pair.both_finite() {
            pair.xs.len().max(pair.es.len())
        } else {
            pair.end(0, false, self.horizon)
        };
        let trace = pair.trace(0, None, end);
        let mut v = Verdict::new(Relation::Majorize, Status::Unknown, Some(end)).with_trace(trace);
        v.notes.extend(pair.notes.iter().cloned());
        let cert = self.lookup(CertifiedRelation::Majorize, Cardinal::Finite(0), None);

        if let Some(i) = v.margin_trace.iter().position(|s| s.is_negative()) {
            if let Some((Claim::HoldsFrom(_), c)) = cert {
                return Err(contradiction(&v.relation, c, i + 1));
            }
            v.status = Status::Fails;
            v.witness = Some(i + 1);
            return Ok(v);
        }
        let (xlo, xhi) = pair.total_interval(pair.x_fin, &pair.xc, &pair.x_tail_sum);
        let (elo, ehi) = pair.total_interval(pair.e_fin, &pair.ec, &pair.e_tail_sum);
        if pair.both_finite() {
            if xlo == elo {
                v.status = Status::Holds;
                v.witness = None;
            } else {
                v.status = Status::Fails;
                v = v.note(format!(
                    "totals differ: {} vs {}",
                    format_rational(&xlo),
                    format_rational(&elo)
                ));
            }
            return Ok(v);
        }
        let disjoint = xhi.as_ref().is_some_and(|h| h < &elo) || ehi.as_ref().is_some_and(|h| h < &xlo);
        if disjoint {
            if let Some((Claim::HoldsFrom(_), c)) = cert {
                return Err(contradiction(&v.relation, c, end));
            }
            v.status = Status::Fails;
            v.witness = None;
            return Ok(v.note("totals cannot agree given the tail sum bounds"));
        }
        Ok(match cert {
            Some((Claim::HoldsFrom(_), c)) => {
                v.status = Status::Holds;
                v.witness = None;
                certified(v, c)
            }
            Some((Claim::Fails, c)) => {
                v.status = Status::Fails;
                v.witness = None;
                certified(v, c)
            }
            None => v.note("totals and unlisted prefix sums are not certified"),
        })
    }

    pub fn strong_pair(&self, pair: &Pair, m: &Verdict) -> Result<Verdict, RelationError> {
        if !m.holds() || pair.both_finite() {
            let mut v = m.clone().relabel(Relation::StrongMajorize);
            if pair.both_finite() && m.holds() {
                v = v.note("finitely supported: the gap is eventually constant and equal to zero");
            }
            return Ok(v);
        }
        let end = m.margin_trace.len();
        let mut v = Verdict::new(Relation::StrongMajorize, Status::Unknown, Some(end))
            .with_trace(m.margin_trace.clone());
        if let Some(min) = v.margin_trace.iter().min().cloned() {
            v = v.note(format!("minimum gap over n <= {end} is {}", format_rational(&min)));
            let half = v.margin_trace.len() / 2;
            if v.margin_trace[half..].iter().all(|g| g.is_positive()) && half > 0 {
                v = v.note("liminf>0 evidence");
            }
        }
        Ok(match self.lookup(CertifiedRelation::StrongMajorize, Cardinal::Finite(0), None) {
            Some((Claim::HoldsFrom(_), c)) => {
                v.status = Status::Holds;
                v.witness = None;
                certified(v, c)
            }
            Some((Claim::Fails, c)) => {
                v.status = Status::Fails;
                v.witness = None;
                certified(v, c)
            }
            None => v,
        })
    }

    /// `≺_p` (when `eps` is `None`) or `≾_p` at a single `ε`.
    pub fn shifted_pair(
        &self,
        pair: &Pair,
        m: &Verdict,
        p: Cardinal,
        eps: Option<&Rational>,
    ) -> Result<Verdict, RelationError> {
        if eps.is_some_and(|e| !e.is_positive()) {
            return Err(RelationError::NonPositiveEpsilon);
        }
        match p {
            Cardinal::Finite(p) => self.shifted_finite(pair, m, p, eps),
            Cardinal::Infinite => self.shifted_infinite(pair, m, eps),
        }
    }

    fn shifted_finite(&self, pair: &Pair, m: &Verdict, p: usize, eps: Option<&Rational>) -> Result<Verdict, RelationError> {
        let relation = relation_for(Cardinal::Finite(p), eps);
        if !m.holds() {
            return Ok(m.clone().relabel(relation).note("requires majorization"));
        }
        if p == 0 && eps.is_none() {
            let mut v = m.clone().relabel(relation);
            v.witness = Some(1);
            return Ok(v);
        }
        let end = pair.end(p, eps.is_some(), self.horizon);
        let trace = pair.trace(p, eps, end);
        let fails: Vec<usize> = trace
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_negative())
            .map(|(i, _)| i + 1)
            .collect();
        let mut v = Verdict::new(relation, Status::Unknown, Some(end)).with_trace(trace);
        if pair.both_finite() {
            v.status = Status::Holds;
            v.witness = Some(fails.last().map_or(1, |n| n + 1));
            return Ok(v);
        }
        let kind = if eps.is_some() {
            CertifiedRelation::ApproxPMajorize
        } else {
            CertifiedRelation::PMajorize
        };
        match self.lookup(kind, Cardinal::Finite(p), eps) {
            Some((Claim::HoldsFrom(from), c)) => {
                let from = from.max(1);
                if let Some(&n) = fails.iter().find(|&&n| n >= from) {
                    return Err(contradiction(&v.relation, c, n));
                }
                v.status = Status::Holds;
                if from <= end + 1 {
                    v.witness = Some(fails.last().map_or(1, |n| n + 1));
                } else if from == certificate::BEYOND {
                    v.witness = None;
                    v = v.note("holds from an index beyond the listed data");
                } else {
                    v.witness = Some(from);
                    v = v.note("witness not minimized beyond the listed data");
                }
                Ok(certified(v, c))
            }
            Some((Claim::Fails, c)) => match fails.first() {
                Some(&n) => {
                    v.status = Status::Fails;
                    v.witness = Some(n);
                    Ok(certified(v, c))
                }
                None => Ok(v.note("certificate asserts failure but no violation occurs in the listed data")),
            },
            None => {
                if let Some(n) = fails.last() {
                    v = v.note(format!("violated at n = {n}; eventual behavior undetermined"));
                }
                Ok(v)
            }
        }
    }

    fn shifted_infinite(&self, pair: &Pair, m: &Verdict, eps: Option<&Rational>) -> Result<Verdict, RelationError> {
        let relation = relation_for(Cardinal::Infinite, eps);
        if !m.holds() {
            return Ok(m.clone().relabel(relation).note("requires majorization"));
        }
        if pair.both_finite() {
            // every p at least the length of ξ* gives the same inequalities
            let p = pair.xs.len();
            let v = self.shifted_finite(pair, m, p, eps)?;
            return Ok(v.relabel(relation).note(format!("all p >= {p} coincide")));
        }
        let mut last = None;
        for p in 0..=self.p_bound {
            let v = self.shifted_finite(pair, m, p, eps)?;
            match v.status {
                Status::Fails => return Ok(v.relabel(relation).note(format!("fails at p = {p}"))),
                Status::Holds => last = v.witness,
                Status::Unknown => {}
            }
        }
        let kind = if eps.is_some() {
            CertifiedRelation::ApproxPMajorize
        } else {
            CertifiedRelation::PMajorize
        };
        let mut v = Verdict::new(relation, Status::Unknown, None);
        match self.lookup(kind, Cardinal::Infinite, eps) {
            Some((Claim::HoldsFrom(_), c)) => {
                v.status = Status::Holds;
                v.witness = last;
                v = v.note(format!("checked every p <= {}", self.p_bound));
                Ok(certified(v, c))
            }
            Some((Claim::Fails, c)) => {
                let pc = c.p.and_then(Cardinal::finite).unwrap_or(0);
                let w = self.shifted_finite(pair, m, pc, eps)?;
                if w.fails() {
                    Ok(w.relabel(v.relation).note(format!("fails at p = {pc}")))
                } else {
                    Ok(v.note(format!("no violation found for p <= {}", self.p_bound)))
                }
            }
            None => Ok(v.note(format!("no violation found for p <= {}", self.p_bound))),
        }
    }

    pub fn curve_pair(&self, pair: &Pair, m: &Verdict, p: Cardinal, grid: &[Rational]) -> Result<EpsCurve, RelationError> {
        let points = grid
            .iter()
            .map(|e| self.shifted_pair(pair, m, p, Some(e)))
            .collect::<Result<Vec<_>, _>>()?;
        let all = if !m.holds() {
            m.status
        } else if points.iter().any(Verdict::fails) {
            Status::Fails
        } else if pair.both_finite() {
            Status::Holds
        } else {
            let certified = self.certificates.iter().any(|c| {
                c.relation == CertifiedRelation::ApproxPMajorize
                    && c.status == Status::Holds
                    && c.all_eps() == Some(true)
                    && c.p.unwrap_or(Cardinal::Finite(0)) >= p
            });
            let refuted = self.certificates.iter().any(|c| {
                c.relation == CertifiedRelation::ApproxPMajorize
                    && c.all_eps() == Some(false)
                    && c.p.unwrap_or(Cardinal::Finite(0)) <= p
            });
            match (certified, refuted) {
                (true, _) => Status::Holds,
                (false, true) => Status::Fails,
                _ => Status::Unknown,
            }
        };
        Ok(EpsCurve {
            p,
            points,
            all_epsilon: all,
        })
    }
}

fn relation_for(p: Cardinal, eps: Option<&Rational>) -> Relation {
    match eps {
        Some(e) => Relation::ApproxPMajorize { p, epsilon: e.clone() },
        None => Relation::PMajorize { p },
    }
}

fn contradiction(relation: &Relation, cert: &AnalyticCertificate, n: usize) -> RelationError {
    RelationError::CertificateContradiction {
        relation: relation.to_string(),
        reason: cert.reason.clone(),
        n,
    }
}

/// Verdicts of `≾_p` over an `ε` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsCurve {
    pub p: Cardinal,
    pub points: Vec<Verdict>,
    /// Status of the statement for every `ε > 0`.
    pub all_epsilon: Status,
}

pub fn majorize(xi: &Sequence, eta: &Sequence) -> Result<Verdict, RelationError> {
    Checker::default().majorize(xi, eta)
}

pub fn strong_majorize(xi: &Sequence, eta: &Sequence, horizon: usize) -> Result<Verdict, RelationError> {
    Checker::new(horizon).strong_majorize(xi, eta)
}

pub fn p_majorize(xi: &Sequence, eta: &Sequence, p: Cardinal, horizon: usize) -> Result<Verdict, RelationError> {
    Checker::new(horizon).p_majorize(xi, eta, p)
}

pub fn approx_p_majorize(
    xi: &Sequence,
    eta: &Sequence,
    p: Cardinal,
    eps: &Rational,
    horizon: usize,
) -> Result<Verdict, RelationError> {
    Checker::new(horizon).approx_p_majorize(xi, eta, p, eps)
}

/// Re-evaluates the inequality a verdict points at, directly from the raw
/// sequences. Returns whether its truth value matches the verdict.
pub fn reproduce(xi: &Sequence, eta: &Sequence, v: &Verdict) -> bool {
    let (Some(n), true) = (v.witness, v.status != Status::Unknown) else {
        return true;
    };
    let xs = monotonize(xi);
    let es = monotonize(eta);
    let sum = |s: &Sequence, m: usize| -> Option<Rational> {
        if m > s.len() && !s.is_finite() {
            return None;
        }
        Some(s.terms().iter().take(m).sum())
    };
    let (p, eps) = match &v.relation {
        Relation::Majorize | Relation::StrongMajorize => (0, None),
        Relation::PMajorize { p } => (p.finite().unwrap_or(xs.len()), None),
        Relation::ApproxPMajorize { p, epsilon } => (p.finite().unwrap_or(xs.len()), Some(epsilon)),
    };
    let rhs = match eps {
        Some(e) => sum(&es, n).zip(sum(&es, n + 1)).map(|(s, s1)| &s + e * (s1 - &s)),
        None => sum(&es, n),
    };
    match (sum(&xs, n + p), rhs) {
        (Some(l), Some(r)) => match v.status {
            Status::Fails if matches!(v.relation, Relation::Majorize) && l <= r => {
                // a totals failure points at the last index
                xs.total() != es.total()
            }
            Status::Fails => l > r,
            _ => l <= r,
        },
        _ => true,
    }
}

#[cfg(test)]
mod tests;
