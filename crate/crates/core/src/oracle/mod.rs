//! Independent float checks: Haar sampling over orthogonal orbits, a second
//! partial-sum implementation, and the necessity bound for doubly
//! stochastic matrices.

pub mod bound;
pub mod float;
pub mod haar;
pub mod search;

use thiserror::Error;

pub use bound::{eq35_window, verify_necessity_bound, NecessityReport};
pub use float::{float_majorize, float_p_witness, FloatVerdict};
pub use haar::{haar_orthogonal, sample_orbit_expectation, sample_rng, SampleOptions, SampleReport, SampleViolation};
pub use search::{conjecture_search, Candidate, SearchReport};

/// Slack for float inequality assertions.
pub const ASSERT_TOL: f64 = 1e-9;
/// Slack for orthogonality of sampled matrices.
pub const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not doubly stochastic: {0}")]
    NotDoublyStochastic(String),
    #[error("eta has {eta} zeros, fewer than N + r = {need}")]
    KernelMismatch { eta: usize, need: usize },
    #[error("epsilon must lie in (0, 1)")]
    BadEpsilon,
}
