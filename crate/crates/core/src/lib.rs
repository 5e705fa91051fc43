//! Exact checking and synthesis for majorization of nonnegative sequences.

pub mod cli;
pub mod numerics;
pub mod oracle;
pub mod relations;
pub mod stochastic;
pub mod synthesis;
pub mod generators;
