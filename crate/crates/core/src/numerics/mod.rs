//! Exact scalars and sequences.

pub mod rational;
pub mod sequence;
pub mod surd;

pub use rational::{format_rational, parse_rational, Cardinal, Rational};
pub use sequence::{monotonize, partial_sums, zero_count_gap, Sequence, SequenceKind};
pub use surd::Surd;
