//! Constructive Schur–Horn synthesis: given `ξ` and `η`, emit an orthogonal
//! plan `M` with `diag(M diag(η) Mᵀ) = ξ`, verified exactly.

pub mod horn;
pub mod interleave;
pub mod plan;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::rational::{serde_rational, serde_rational_vec, Cardinal, Rational};
use crate::numerics::sequence::{Sequence, SequenceError};
use crate::stochastic::matrix::{surd_schur_square, DenseMatrix};
use crate::stochastic::surd_expectation_diag;

pub use horn::{horn_finite, horn_sorted};
pub use interleave::{compress, decompression_plan, select_interleaving, Interleaving};
pub use plan::{RotationStep, UnitaryPlan};

use plan::decreasing_order;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("synthesis needs finitely supported inputs")]
    NotFinite,
    #[error("interleaving needs monotone input")]
    NotMonotone,
    #[error("window lengths differ: xi has {xi}, eta has {eta}")]
    LengthMismatch { xi: usize, eta: usize },
    #[error("xi is not majorized by eta: prefix {n} violates")]
    NotMajorized { n: usize },
    #[error("kernel guard: xi has {xi} zeros but eta only {eta}")]
    KernelGuard { xi: Cardinal, eta: Cardinal },
    #[error("interleaving incomplete: {} of {} blocks found", partial.blocks(), partial.p)]
    Incomplete { partial: Interleaving },
    #[error("window of length {len} exceeds horizon {horizon}")]
    HorizonExceeded { len: usize, horizon: usize },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("internal check failed: {0}")]
    Internal(String),
}

/// Zero counts of `ξ` and `η`. `window` is set when they were counted on a
/// common finite window of two finitely supported sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCounts {
    pub xi: Cardinal,
    pub eta: Cardinal,
    pub window: Option<usize>,
}

/// Necessary condition `|ξ⁻¹(0)| ≤ |η⁻¹(0)|`.
pub fn kernel_guard(xi: &Sequence, eta: &Sequence) -> Result<KernelCounts, SynthesisError> {
    let counts = if xi.is_finite() && eta.is_finite() {
        let n = xi.len().max(eta.len());
        let zeros = |s: &Sequence| s.padded(n).iter().filter(|t| t.is_zero()).count();
        KernelCounts { xi: zeros(xi).into(), eta: zeros(eta).into(), window: Some(n) }
    } else {
        KernelCounts { xi: xi.zero_count()?, eta: eta.zero_count()?, window: None }
    };
    if counts.xi > counts.eta {
        return Err(SynthesisError::KernelGuard { xi: counts.xi, eta: counts.eta });
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisCase {
    /// Horn on the whole window.
    FiniteRank,
    /// Equal kernels: Horn on the common support.
    KernelFree,
    /// Interleave, compress, Horn, decompress, permute.
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Auto,
    FiniteRank,
}

#[derive(Debug, Clone, Copy)]
pub struct SynthesisOptions {
    pub horizon: usize,
    pub pipeline: Pipeline,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { horizon: crate::relations::DEFAULT_HORIZON, pipeline: Pipeline::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub orthogonal: bool,
    pub diagonal: bool,
    pub schur: bool,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.orthogonal && self.diagonal && self.schur
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisCertificate {
    pub xi: Sequence,
    pub eta: Sequence,
    pub kernel: KernelCounts,
    pub p: usize,
    pub case: SynthesisCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interleaving: Option<Interleaving>,
    #[serde(default, with = "serde_rational_vec", skip_serializing_if = "Vec::is_empty")]
    pub compressed: Vec<Rational>,
    pub plan: UnitaryPlan,
    #[serde(with = "serde_rational_vec")]
    pub achieved: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub residual: Rational,
    pub verification: Verification,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SynthesisCertificate {
    pub fn window(&self) -> usize {
        self.plan.dimension
    }

    /// Orthostochastic `Q = M ∘ M`.
    pub fn orthostochastic(&self) -> DenseMatrix<Rational> {
        surd_schur_square(&self.plan.materialize()).expect("plans have monomial entries")
    }
}

/// Re-multiplies the plan from scratch and compares against `ξ`.
pub fn verify_plan(plan: &UnitaryPlan, xi: &[Rational], eta: &[Rational]) -> Result<Verification, SynthesisError> {
    if let Some(d) = plan.defect() {
        return Err(SynthesisError::Internal(d));
    }
    if xi.len() != plan.dimension || eta.len() != plan.dimension {
        return Err(SynthesisError::LengthMismatch { xi: xi.len(), eta: eta.len() });
    }
    let m = plan.materialize();
    let diagonal = surd_expectation_diag(&m, eta).is_some_and(|d| d == xi);
    let schur = surd_schur_square(&m).is_some_and(|q| q.mul_vec(eta) == xi);
    Ok(Verification { orthogonal: m.gram_rows().is_identity(), diagonal, schur })
}

pub fn verify_certificate(cert: &SynthesisCertificate) -> Result<Verification, SynthesisError> {
    let n = cert.window();
    verify_plan(&cert.plan, &cert.xi.padded(n), &cert.eta.padded(n))
}

struct Built {
    plan: UnitaryPlan,
    case: SynthesisCase,
    interleaving: Option<Interleaving>,
    compressed: Vec<Rational>,
    notes: Vec<String>,
}

fn sorted(v: &[Rational], order: &[usize]) -> Vec<Rational> {
    order.iter().map(|&i| v[i].clone()).collect()
}

fn horn_window(n: usize, x: &[Rational], y: &[Rational], ox: &[usize], oy: &[usize], width: usize) -> Result<UnitaryPlan, SynthesisError> {
    let mut plan = UnitaryPlan::new(n);
    plan.push(plan::sort_step(oy));
    plan.extend(horn_sorted(&x[..width], &y[..width], 0)?);
    plan.push(plan::unsort_step(ox));
    Ok(plan)
}

fn interleaved(n: usize, x: &[Rational], y: &[Rational], ox: &[usize], oy: &[usize], work: usize, support: usize, i: Interleaving) -> Result<Built, SynthesisError> {
    let xs = &x[..work];
    let compressed = compress(xs, &i)?;
    let mut plan = UnitaryPlan::new(n);
    plan.push(plan::sort_step(oy));
    let horn = horn_sorted(&compressed, &y[..support], 0)
        .map_err(|e| SynthesisError::Internal(format!("compressed pair: {e}")))?;
    plan.extend(horn);
    plan.extend(decompression_plan(xs, &i, support));
    let mut pos = interleave::decompressed_positions(&i, support);
    pos.extend(work + 1..=n);
    plan.push(RotationStep::Perm { map: pos.iter().map(|&s| ox[s - 1] + 1).collect() });
    Ok(Built { plan, case: SynthesisCase::Interleaved, interleaving: Some(i), compressed, notes: vec![] })
}

/// Builds and verifies a plan for finitely supported `ξ ≺ η`.
///
/// `p` is the difference of zero counts on the common window. With `p = 0`
/// the common zeros are stripped and Horn runs on the support; with `p ≥ 1`
/// the interleaving pipeline runs, falling back to Horn on the whole window
/// when the window admits no interleaving.
pub fn synthesize(xi: &Sequence, eta: &Sequence, opts: &SynthesisOptions) -> Result<SynthesisCertificate, SynthesisError> {
    if !xi.is_finite() || !eta.is_finite() {
        return Err(SynthesisError::NotFinite);
    }
    let n = xi.len().max(eta.len());
    if n > opts.horizon {
        return Err(SynthesisError::HorizonExceeded { len: n, horizon: opts.horizon });
    }
    let (xw, ew) = (xi.padded(n), eta.padded(n));
    let (ox, oy) = (decreasing_order(&xw), decreasing_order(&ew));
    let (x, y) = (sorted(&xw, &ox), sorted(&ew, &oy));
    horn::check_majorized(&x, &y)?;
    let kernel = kernel_guard(xi, eta)?;
    let (zx, ze) = (kernel.xi.finite().unwrap_or(0), kernel.eta.finite().unwrap_or(0));
    let p = ze - zx;
    let (work, support) = (n - zx, n - ze);
    let full = |notes: Vec<String>| -> Result<Built, SynthesisError> {
        Ok(Built {
            plan: horn_window(n, &x, &y, &ox, &oy, n)?,
            case: SynthesisCase::FiniteRank,
            interleaving: None,
            compressed: vec![],
            notes,
        })
    };
    let built = match (opts.pipeline, p) {
        (Pipeline::FiniteRank, _) => full(vec![])?,
        (Pipeline::Auto, 0) => Built {
            plan: horn_window(n, &x, &y, &ox, &oy, work)?,
            case: SynthesisCase::KernelFree,
            interleaving: None,
            compressed: vec![],
            notes: vec![],
        },
        (Pipeline::Auto, _) => match interleave::select_on(&x[..work], &y[..support], p, true) {
            Ok(i) => interleaved(n, &x, &y, &ox, &oy, work, support, i)?,
            Err(SynthesisError::Incomplete { partial }) => full(vec![format!(
                "no interleaving in the window ({} of {p} blocks); used Horn on the full window",
                partial.blocks()
            )])?,
            Err(e) => return Err(e),
        },
    };
    let achieved = built.plan.apply_to_diagonal(&ew);
    let residual = achieved
        .iter()
        .zip(&xw)
        .map(|(a, b)| num_traits::Signed::abs(&(a - b)))
        .max()
        .unwrap_or_else(Rational::zero);
    let verification = verify_plan(&built.plan, &xw, &ew)?;
    if !verification.passed() || !residual.is_zero() {
        return Err(SynthesisError::Internal(format!("plan failed re-verification: {verification:?}")));
    }
    Ok(SynthesisCertificate {
        xi: xi.clone(),
        eta: eta.clone(),
        kernel,
        p,
        case: built.case,
        interleaving: built.interleaving,
        compressed: built.compressed,
        plan: built.plan,
        achieved,
        residual,
        verification,
        notes: built.notes,
    })
}
