//! Consistency of the implications between the relations.

use std::fmt;

use serde::Serialize;

use super::verdict::{Status, Verdict};
use super::{Checker, EpsCurve, Pair, RelationError};
use crate::numerics::rational::{pow2_inv, Cardinal, Rational};
use crate::numerics::sequence::Sequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeOutcome {
    /// Antecedent and consequent both hold.
    Confirmed,
    /// Antecedent holds and consequent fails.
    Violated,
    /// Antecedent does not hold or is unknown.
    Skipped,
    /// Antecedent holds and consequent is unknown.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub name: &'static str,
    pub antecedent: String,
    pub consequent: String,
    pub outcome: EdgeOutcome,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} => {}: {:?}", self.name, self.antecedent, self.consequent, self.outcome)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HierarchyReport {
    pub majorize: Status,
    pub strong: Status,
    /// `(p, status, witness)` for `p = 0..=p_bound`.
    pub p_majorize: Vec<(usize, Status, Option<usize>)>,
    pub p_infinite: Status,
    /// `(p, status for every ε)` for `p = 0..=p_bound`.
    pub approx: Vec<(usize, Status)>,
    pub approx_infinite: Status,
    pub edges: Vec<Edge>,
}

impl HierarchyReport {
    pub fn violations(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.outcome == EdgeOutcome::Violated)
    }

    pub fn is_consistent(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn count(&self, name: &str, outcome: EdgeOutcome) -> usize {
        self.edges.iter().filter(|e| e.name == name && e.outcome == outcome).count()
    }
}

fn implies(a: Status, b: Status) -> EdgeOutcome {
    match (a, b) {
        (Status::Holds, Status::Holds) => EdgeOutcome::Confirmed,
        (Status::Holds, Status::Fails) => EdgeOutcome::Violated,
        (Status::Holds, Status::Unknown) => EdgeOutcome::Unresolved,
        _ => EdgeOutcome::Skipped,
    }
}

fn edge(name: &'static str, a: String, b: String, outcome: EdgeOutcome) -> Edge {
    Edge {
        name,
        antecedent: a,
        consequent: b,
        outcome,
    }
}

/// Default `ε` grid: `1, 1/2, 1/8, 1/64, 1/1024`.
pub fn default_eps_grid() -> Vec<Rational> {
    [0u32, 1, 3, 6, 10].into_iter().map(pow2_inv).collect()
}

impl Checker {
    /// Evaluates every relation on the pair and checks each implication.
    pub fn hierarchy(&self, xi: &Sequence, eta: &Sequence, grid: &[Rational]) -> Result<HierarchyReport, RelationError> {
        let pair = Pair::new(xi, eta);
        let m = self.majorize_pair(&pair)?;
        let s = self.strong_pair(&pair, &m)?;
        let pb = self.p_bound;
        let shifted: Vec<Verdict> = (0..=pb)
            .map(|p| self.shifted_pair(&pair, &m, Cardinal::Finite(p), None))
            .collect::<Result<_, _>>()?;
        let inf = self.shifted_pair(&pair, &m, Cardinal::Infinite, None)?;
        let curves: Vec<EpsCurve> = (0..=pb)
            .map(|p| self.curve_pair(&pair, &m, Cardinal::Finite(p), grid))
            .collect::<Result<_, _>>()?;
        let inf_curve = self.curve_pair(&pair, &m, Cardinal::Infinite, grid)?;

        let mut edges = Vec::new();
        edges.push(edge("p0_is_majorize", "≺_0".into(), "≺".into(), implies(shifted[0].status, m.status)));
        edges.push(edge("p0_is_majorize", "≺".into(), "≺_0".into(), implies(m.status, shifted[0].status)));
        edges.push(edge("strong_implies_majorize", "≼".into(), "≺".into(), implies(s.status, m.status)));
        for p in 1..=pb {
            for q in 0..p {
                let (vp, vq) = (&shifted[p], &shifted[q]);
                let mut outcome = implies(vp.status, vq.status);
                if outcome == EdgeOutcome::Confirmed && matches!((vp.witness, vq.witness), (Some(a), Some(b)) if a < b) {
                    outcome = EdgeOutcome::Violated;
                }
                edges.push(edge("p_monotone", format!("≺_{p}"), format!("≺_{q}"), outcome));
            }
        }
        for (p, c) in curves.iter().enumerate() {
            edges.push(edge(
                "p_implies_approx",
                format!("≺_{p}"),
                format!("≾_{p}"),
                implies(shifted[p].status, c.all_epsilon),
            ));
            if p == 0 {
                continue;
            }
            edges.push(edge(
                "approx_implies_shift",
                format!("≾_{p}"),
                format!("≺_{}", p - 1),
                implies(c.all_epsilon, shifted[p - 1].status),
            ));
            for point in &c.points {
                if let super::Relation::ApproxPMajorize { epsilon, .. } = &point.relation {
                    if *epsilon < Rational::from_integer(1.into()) {
                        edges.push(edge(
                            "approx_implies_shift",
                            format!("≾_{p} at ε={}", crate::numerics::format_rational(epsilon)),
                            format!("≺_{}", p - 1),
                            implies(point.status, shifted[p - 1].status),
                        ));
                    }
                }
            }
        }
        edges.push(edge("infinite_equivalence", "≺_∞".into(), "≾_∞".into(), implies(inf.status, inf_curve.all_epsilon)));
        edges.push(edge("infinite_equivalence", "≾_∞".into(), "≺_∞".into(), implies(inf_curve.all_epsilon, inf.status)));
        let not_strong = match (m.status, s.status) {
            (Status::Holds, Status::Fails) => Status::Holds,
            (Status::Fails, _) | (_, Status::Holds) => Status::Fails,
            _ => Status::Unknown,
        };
        edges.push(edge("not_strong_implies_infinite", "≺ ∧ ¬≼".into(), "≺_∞".into(), implies(not_strong, inf.status)));

        Ok(HierarchyReport {
            majorize: m.status,
            strong: s.status,
            p_majorize: shifted.iter().enumerate().map(|(p, v)| (p, v.status, v.witness)).collect(),
            p_infinite: inf.status,
            approx: curves.iter().enumerate().map(|(p, c)| (p, c.all_epsilon)).collect(),
            approx_infinite: inf_curve.all_epsilon,
            edges,
        })
    }
}

/// Hierarchy check with default `p` bound and `ε` grid.
pub fn hierarchy_check(xi: &Sequence, eta: &Sequence, horizon: usize) -> Result<HierarchyReport, RelationError> {
    Checker::new(horizon).hierarchy(xi, eta, &default_eps_grid())
}
