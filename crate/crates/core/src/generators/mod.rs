//! Parametric families with analytic certificates.
//!
//! Every family returns a [`Generated`] whose certificates are the closed-form
//! facts the relations checker cannot infer from finite data. [`Generated::confirm`]
//! runs the checker with those certificates and demands agreement.

pub mod families;
pub mod strong_infty;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::rational::{Cardinal, Rational};
use crate::numerics::sequence::{Sequence, SequenceError};
use crate::relations::certificate::{AnalyticCertificate, CertifiedRelation, EpsRule};
use crate::relations::hierarchy::default_eps_grid;
use crate::relations::{Checker, RelationError, Status, Verdict};

pub use families::{
    convex_mix, gen_app_gap, gen_half_ampliation, gen_p_gap, half_ampliation_sandwich, BaseFamily, ConvexMix, Sandwich,
};
pub use strong_infty::{gen_strong_and_infty, StrongInftyBlock, StrongInftyChecks, StrongInftyTrace};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("certificate `{reason}` claims {claimed:?} but the checker found {found:?}")]
    Disagreement { reason: String, claimed: Status, found: Status },
    #[error("index budget {budget} exhausted while building block {block}")]
    Budget { budget: usize, block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PGap,
    HalfAmpliation,
    AppGap,
    Prop28,
    Convex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub family: Family,
    pub params: serde_json::Value,
    pub xi: Sequence,
    pub eta: Sequence,
    pub certificates: Vec<AnalyticCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<StrongInftyTrace>,
}

impl Generated {
    pub fn checker(&self, horizon: usize) -> Checker {
        Checker::new(horizon).with_certificates(self.certificates.clone())
    }

    /// Runs each certified relation through the checker and compares statuses.
    pub fn confirm(&self, horizon: usize) -> Result<Vec<Verdict>, GeneratorError> {
        let c = self.checker(horizon);
        let mut out = Vec::new();
        for cert in &self.certificates {
            let p = cert.p.unwrap_or(Cardinal::Finite(0));
            let checks: Vec<(Status, Verdict)> = match cert.relation {
                CertifiedRelation::Majorize => vec![(cert.status, c.majorize(&self.xi, &self.eta)?)],
                CertifiedRelation::StrongMajorize => vec![(cert.status, c.strong_majorize(&self.xi, &self.eta)?)],
                CertifiedRelation::PMajorize => vec![(cert.status, c.p_majorize(&self.xi, &self.eta, p)?)],
                CertifiedRelation::ApproxPMajorize => approx_checks(&c, cert, &self.xi, &self.eta, p)?,
            };
            for (claimed, v) in checks {
                if v.status != claimed {
                    return Err(GeneratorError::Disagreement { reason: cert.reason.clone(), claimed, found: v.status });
                }
                out.push(v);
            }
        }
        Ok(out)
    }
}

fn approx_checks(
    c: &Checker,
    cert: &AnalyticCertificate,
    xi: &Sequence,
    eta: &Sequence,
    p: Cardinal,
) -> Result<Vec<(Status, Verdict)>, GeneratorError> {
    let grid: Vec<Rational> = match &cert.eps {
        Some(EpsRule::Threshold { holds_at_or_above }) => {
            vec![holds_at_or_above.clone(), holds_at_or_above / Rational::from_integer(2.into())]
        }
        _ => default_eps_grid(),
    };
    let mut out = Vec::new();
    for e in grid {
        let claimed = match &cert.eps {
            Some(EpsRule::Threshold { holds_at_or_above }) if e < *holds_at_or_above => Status::Fails,
            _ => cert.status,
        };
        out.push((claimed, c.approx_p_majorize(xi, eta, p, &e)?));
    }
    Ok(out)
}
