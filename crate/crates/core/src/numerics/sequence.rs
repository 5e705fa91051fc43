//! Nonnegative sequences: finitely supported vectors and truncated
//! prefixes of infinite sequences with declared tail information.
//!
//! Indices in the public API are 1-based, matching the `Σ_{k=1}^n`
//! convention of the relations built on top of this module.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rational::{format_rational, parse_rational, Cardinal, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("term {index} is negative ({value})")]
    NegativeTerm { index: usize, value: String },
    #[error("sequence declared monotone but term {index} exceeds term {prev}")]
    NotMonotone { index: usize, prev: usize },
    #[error("tail bound {tail_bound} exceeds the last listed term {last}")]
    TailBoundTooLarge { tail_bound: String, last: String },
    #[error("finitely supported sequences carry no tail information")]
    TailOnFinite,
    #[error("negative tail bound")]
    NegativeTailBound,
    #[error("horizon {horizon} exceeds the {listed} listed terms")]
    HorizonBeyondData { horizon: usize, listed: usize },
    #[error("zero set undecidable: {0}")]
    UndecidableSupport(String),
    #[error("bad sequence field: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    /// Every unlisted term is exactly zero.
    FinitelySupported,
    /// The listed terms are a prefix of an infinite sequence.
    Truncated,
}

/// A nonnegative sequence. See the module docs for the two kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SequenceJson", into = "SequenceJson")]
pub struct Sequence {
    terms: Vec<Rational>,
    kind: SequenceKind,
    /// Truncated only: every unlisted term is `<=` this value.
    tail_bound: Option<Rational>,
    /// Truncated only: the sum of all unlisted terms is `<=` this value.
    tail_sum_bound: Option<Rational>,
    monotone: bool,
    /// Truncated only: every unlisted term is strictly positive.
    tail_positive: bool,
}

/// The JSON shape of a sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceJson {
    pub kind: String,
    pub terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_sum_bound: Option<String>,
    #[serde(default)]
    pub monotone: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tail_positive: bool,
}

impl TryFrom<SequenceJson> for Sequence {
    type Error = SequenceError;

    fn try_from(j: SequenceJson) -> Result<Self, Self::Error> {
        let parse = |field: &str, s: &str| {
            parse_rational(s).map_err(|e| SequenceError::Parse(format!("{field}: {e}")))
        };
        let terms = j
            .terms
            .iter()
            .enumerate()
            .map(|(i, s)| parse(&format!("terms[{i}]"), s))
            .collect::<Result<Vec<_>, _>>()?;
        let tail_bound = j.tail_bound.as_deref().map(|s| parse("tail_bound", s)).transpose()?;
        let tail_sum_bound = j
            .tail_sum_bound
            .as_deref()
            .map(|s| parse("tail_sum_bound", s))
            .transpose()?;
        match j.kind.as_str() {
            "finite" => {
                if tail_bound.is_some() || tail_sum_bound.is_some() || j.tail_positive {
                    return Err(SequenceError::TailOnFinite);
                }
                let s = Sequence::finite(terms)?;
                if j.monotone && !s.monotone {
                    return Err(first_increase(&s.terms));
                }
                Ok(s)
            }
            "truncated" => {
                let mut s = Sequence::truncated(terms, tail_bound)?;
                if let Some(b) = tail_sum_bound {
                    s = s.with_tail_sum_bound(b)?;
                }
                s = s.with_tail_positive(j.tail_positive);
                if j.monotone {
                    s = s.declare_monotone()?;
                }
                Ok(s)
            }
            other => Err(SequenceError::Parse(format!(
                "kind: expected \"finite\" or \"truncated\", got {other:?}"
            ))),
        }
    }
}

impl From<Sequence> for SequenceJson {
    fn from(s: Sequence) -> Self {
        SequenceJson {
            kind: match s.kind {
                SequenceKind::FinitelySupported => "finite".into(),
                SequenceKind::Truncated => "truncated".into(),
            },
            terms: s.terms.iter().map(format_rational).collect(),
            tail_bound: s.tail_bound.as_ref().map(format_rational),
            tail_sum_bound: s.tail_sum_bound.as_ref().map(format_rational),
            monotone: s.monotone,
            tail_positive: s.tail_positive,
        }
    }
}

fn check_nonnegative(terms: &[Rational]) -> Result<(), SequenceError> {
    match terms.iter().position(|t| t.is_negative()) {
        Some(i) => Err(SequenceError::NegativeTerm {
            index: i + 1,
            value: format_rational(&terms[i]),
        }),
        None => Ok(()),
    }
}

fn is_nonincreasing(terms: &[Rational]) -> bool {
    terms.windows(2).all(|w| w[0] >= w[1])
}

fn first_increase(terms: &[Rational]) -> SequenceError {
    let i = terms.windows(2).position(|w| w[0] < w[1]).unwrap_or(0);
    SequenceError::NotMonotone { index: i + 2, prev: i + 1 }
}

/// What is known about a single index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroStatus {
    Zero,
    Nonzero,
    Unknown,
}

impl Sequence {
    /// A finitely supported sequence; unlisted terms are zero.
    pub fn finite(terms: Vec<Rational>) -> Result<Self, SequenceError> {
        check_nonnegative(&terms)?;
        let monotone = is_nonincreasing(&terms);
        Ok(Sequence {
            terms,
            kind: SequenceKind::FinitelySupported,
            tail_bound: None,
            tail_sum_bound: None,
            monotone,
            tail_positive: false,
        })
    }

    /// A listed prefix of an infinite sequence.
    pub fn truncated(terms: Vec<Rational>, tail_bound: Option<Rational>) -> Result<Self, SequenceError> {
        check_nonnegative(&terms)?;
        if tail_bound.as_ref().is_some_and(|b| b.is_negative()) {
            return Err(SequenceError::NegativeTailBound);
        }
        Ok(Sequence {
            terms,
            kind: SequenceKind::Truncated,
            tail_bound,
            tail_sum_bound: None,
            monotone: false,
            tail_positive: false,
        })
    }

    pub fn with_tail_sum_bound(mut self, bound: Rational) -> Result<Self, SequenceError> {
        if self.kind == SequenceKind::FinitelySupported {
            return Err(SequenceError::TailOnFinite);
        }
        if bound.is_negative() {
            return Err(SequenceError::NegativeTailBound);
        }
        self.tail_sum_bound = Some(bound);
        Ok(self)
    }

    /// Declares that every unlisted term is strictly positive (infinite support).
    pub fn with_tail_positive(mut self, positive: bool) -> Self {
        if self.kind == SequenceKind::Truncated {
            self.tail_positive = positive;
        }
        self
    }

    /// Declares the whole (infinite) sequence nonincreasing. Verified on
    /// the listed terms and against the tail bound; a missing tail bound
    /// becomes the last listed term.
    pub fn declare_monotone(mut self) -> Result<Self, SequenceError> {
        if !is_nonincreasing(&self.terms) {
            return Err(first_increase(&self.terms));
        }
        if self.kind == SequenceKind::Truncated {
            match (&self.tail_bound, self.terms.last()) {
                (Some(b), Some(last)) if b > last => {
                    return Err(SequenceError::TailBoundTooLarge {
                        tail_bound: format_rational(b),
                        last: format_rational(last),
                    })
                }
                (None, Some(last)) => self.tail_bound = Some(last.clone()),
                _ => {}
            }
        }
        self.monotone = true;
        Ok(self)
    }

    pub fn terms(&self) -> &[Rational] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn is_finite(&self) -> bool {
        self.kind == SequenceKind::FinitelySupported
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn tail_bound(&self) -> Option<&Rational> {
        self.tail_bound.as_ref()
    }

    pub fn tail_sum_bound(&self) -> Option<&Rational> {
        self.tail_sum_bound.as_ref()
    }

    pub fn tail_positive(&self) -> bool {
        self.tail_positive
    }

    /// Term at 1-based index `k`; unlisted terms of a finitely supported
    /// sequence are zero, unlisted truncated terms are unknown.
    pub fn get(&self, k: usize) -> Option<Rational> {
        assert!(k >= 1, "sequence indices are 1-based");
        match self.terms.get(k - 1) {
            Some(t) => Some(t.clone()),
            None if self.is_finite() => Some(Rational::zero()),
            None => None,
        }
    }

    /// Exact total for finitely supported sequences.
    pub fn total(&self) -> Option<Rational> {
        self.is_finite().then(|| self.terms.iter().sum())
    }

    /// The finite support length: index of the last nonzero term (0 if none).
    pub fn support_end(&self) -> Option<usize> {
        self.is_finite()
            .then(|| self.terms.iter().rposition(|t| !t.is_zero()).map_or(0, |i| i + 1))
    }

    /// Number of zeros among the listed terms.
    pub fn listed_zero_count(&self) -> usize {
        self.terms.iter().filter(|t| t.is_zero()).count()
    }

    /// Zero-status of 1-based index `k`, taking tail declarations into account.
    pub fn zero_status(&self, k: usize) -> ZeroStatus {
        match self.terms.get(k - 1) {
            Some(t) if t.is_zero() => ZeroStatus::Zero,
            Some(_) => ZeroStatus::Nonzero,
            None => self.tail_zero_status(),
        }
    }

    fn tail_zero_status(&self) -> ZeroStatus {
        match self.kind {
            SequenceKind::FinitelySupported => ZeroStatus::Zero,
            SequenceKind::Truncated if self.tail_positive => ZeroStatus::Nonzero,
            SequenceKind::Truncated if self.tail_bound.as_ref().is_some_and(|b| b.is_zero()) => {
                ZeroStatus::Zero
            }
            SequenceKind::Truncated => ZeroStatus::Unknown,
        }
    }

    /// Kernel dimension `|s^{-1}(0)|` of the full sequence.
    pub fn zero_count(&self) -> Result<Cardinal, SequenceError> {
        match self.tail_zero_status() {
            ZeroStatus::Zero => Ok(Cardinal::Infinite),
            ZeroStatus::Nonzero => Ok(Cardinal::Finite(self.listed_zero_count())),
            ZeroStatus::Unknown => Err(SequenceError::UndecidableSupport(
                "truncated sequence without a support declaration".into(),
            )),
        }
    }

    /// Finitely supported copy padded with zeros to at least `n` terms.
    pub fn padded(&self, n: usize) -> Vec<Rational> {
        let mut v = self.terms.clone();
        if v.len() < n {
            v.resize(n, Rational::zero());
        }
        v
    }

    /// Same kind and tail data with the terms replaced (used by generators).
    pub fn map_terms(&self, f: impl Fn(&Rational) -> Rational) -> Sequence {
        Sequence {
            terms: self.terms.iter().map(&f).collect(),
            tail_bound: self.tail_bound.as_ref().map(&f),
            tail_sum_bound: self.tail_sum_bound.as_ref().map(&f),
            ..self.clone()
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_rational(t))?;
        }
        if self.kind == SequenceKind::Truncated {
            f.write_str(", …")?;
        }
        f.write_str(")")
    }
}

/// Exact prefix sums: `sums[n-1] = Σ_{k=1}^n terms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSumTable {
    pub sums: Vec<Rational>,
    /// Present only for finitely supported sequences.
    pub total: Option<Rational>,
}

impl PartialSumTable {
    /// `Σ_{k=1}^n`, with `n = 0` giving zero.
    pub fn at(&self, n: usize) -> &Rational {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        if n == 0 {
            ZERO.get_or_init(Rational::zero)
        } else {
            &self.sums[n - 1]
        }
    }
}

/// Prefix sums with a leading zero: `out[n] = Σ_{k=1}^n terms`.
pub fn cumulative(terms: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(terms.len() + 1);
    let mut acc = Rational::zero();
    out.push(acc.clone());
    for t in terms {
        acc += t;
        out.push(acc.clone());
    }
    out
}

/// The decreasing rearrangement `s*`.
///
/// Finitely supported inputs keep their zeros at the end. Truncated
/// inputs declared to have infinite support drop listed zeros; of the
/// remaining listed terms only those `>=` the tail bound are certainly
/// among the largest, so the result lists exactly those.
pub fn monotonize(s: &Sequence) -> Sequence {
    let mut terms = s.terms.clone();
    terms.sort_by(|a, b| b.cmp(a));
    match s.kind {
        SequenceKind::FinitelySupported => Sequence {
            terms,
            monotone: true,
            ..s.clone()
        },
        SequenceKind::Truncated => {
            if s.tail_positive {
                terms.retain(|t| !t.is_zero());
            }
            let bound = s.tail_bound.clone().or_else(|| {
                // a monotone declaration without explicit bound uses the last term
                s.monotone.then(|| s.terms.last().cloned()).flatten()
            });
            let (kept, dropped): (Vec<_>, Vec<_>) = match &bound {
                Some(b) => terms.into_iter().partition(|t| t >= b),
                None => (Vec::new(), terms),
            };
            let dropped_sum: Rational = dropped.iter().sum();
            let tail_bound = match (&bound, dropped.first()) {
                (Some(b), _) => Some(b.clone()),
                (None, _) => None,
            };
            Sequence {
                terms: kept,
                kind: SequenceKind::Truncated,
                tail_bound,
                tail_sum_bound: s.tail_sum_bound.as_ref().map(|b| b + dropped_sum),
                monotone: true,
                tail_positive: s.tail_positive,
            }
        }
    }
}

/// Exact partial sums up to `horizon` listed terms.
pub fn partial_sums(s: &Sequence, horizon: usize) -> Result<PartialSumTable, SequenceError> {
    if horizon > s.len() {
        return Err(SequenceError::HorizonBeyondData {
            horizon,
            listed: s.len(),
        });
    }
    let mut sums = cumulative(&s.terms[..horizon]);
    sums.remove(0);
    Ok(PartialSumTable {
        sums,
        total: s.total(),
    })
}

/// `|a^{-1}(0) \ b^{-1}(0)|`, where unlisted indices of finitely supported
/// sequences count as zeros.
pub fn zero_count_gap(a: &Sequence, b: &Sequence) -> Result<Cardinal, SequenceError> {
    let window = a.len().max(b.len());
    let mut count = 0usize;
    for k in 1..=window {
        match (a.zero_status(k), b.zero_status(k)) {
            (ZeroStatus::Zero, ZeroStatus::Nonzero) => count += 1,
            (ZeroStatus::Nonzero, _) | (ZeroStatus::Zero, ZeroStatus::Zero) => {}
            _ => {
                return Err(SequenceError::UndecidableSupport(format!(
                    "zero status of index {k} is not determined"
                )))
            }
        }
    }
    match (a.tail_zero_status(), b.tail_zero_status()) {
        (ZeroStatus::Zero, ZeroStatus::Nonzero) => Ok(Cardinal::Infinite),
        (ZeroStatus::Nonzero, _) | (ZeroStatus::Zero, ZeroStatus::Zero) => Ok(Cardinal::Finite(count)),
        _ => Err(SequenceError::UndecidableSupport(
            "tails lack support declarations".into(),
        )),
    }
}

/// The 2-ampliation `D₂s = (s₁, s₁, s₂, s₂, …)`.
pub fn ampliate2(s: &Sequence) -> Sequence {
    let terms = s.terms.iter().flat_map(|t| [t.clone(), t.clone()]).collect();
    Sequence {
        terms,
        tail_sum_bound: s.tail_sum_bound.as_ref().map(|b| b * Rational::from_integer(2.into())),
        ..s.clone()
    }
}
