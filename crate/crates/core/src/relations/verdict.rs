use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::rational::{serde_rational, serde_rational_vec, Cardinal, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Unknown => "unknown",
        })
    }
}

/// A relation together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum Relation {
    Majorize,
    StrongMajorize,
    PMajorize {
        p: Cardinal,
    },
    ApproxPMajorize {
        p: Cardinal,
        #[serde(with = "serde_rational")]
        epsilon: Rational,
    },
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Majorize => f.write_str("majorize"),
            Relation::StrongMajorize => f.write_str("strong_majorize"),
            Relation::PMajorize { p } => write!(f, "p_majorize(p={p})"),
            Relation::ApproxPMajorize { p, epsilon } => write!(
                f,
                "approx_p_majorize(p={p}, epsilon={})",
                crate::numerics::format_rational(epsilon)
            ),
        }
    }
}

/// Outcome of a relation check.
///
/// `witness` is `N_p` (or `N_{p,ε}`) when the relation holds, the first
/// violated index when it fails and the last examined index when unknown.
/// `margin_trace[n-1]` is the slack of the inequality at `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub relation: Relation,
    pub status: Status,
    pub witness: Option<usize>,
    #[serde(with = "serde_rational_vec")]
    pub margin_trace: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_by: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn new(relation: Relation, status: Status, witness: Option<usize>) -> Self {
        Verdict {
            relation,
            status,
            witness,
            margin_trace: Vec::new(),
            certified_by: None,
            notes: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }

    pub fn with_trace(mut self, trace: Vec<Rational>) -> Self {
        self.margin_trace = trace;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// The same outcome reported under another relation name.
    pub fn relabel(mut self, relation: Relation) -> Self {
        self.relation = relation;
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.relation, self.status)?;
        if let Some(w) = self.witness {
            write!(f, " (witness {w})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    #[test]
    fn json_shape() {
        let v = Verdict::new(
            Relation::ApproxPMajorize { p: Cardinal::Finite(1), epsilon: rat(1, 8) },
            Status::Holds,
            Some(2),
        )
        .with_trace(vec![rat(1, 16)]);
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["relation"], "approx_p_majorize");
        assert_eq!(j["p"], 1);
        assert_eq!(j["epsilon"], "1/8");
        assert_eq!(j["status"], "holds");
        assert_eq!(j["margin_trace"][0], "1/16");
        let back: Verdict = serde_json::from_value(j).unwrap();
        assert_eq!(back, v);

        let inf = Verdict::new(Relation::PMajorize { p: Cardinal::Infinite }, Status::Unknown, None);
        assert_eq!(serde_json::to_value(&inf).unwrap()["p"], "inf");
    }
}
