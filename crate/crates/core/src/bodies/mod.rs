//! Symmetric star bodies given by gauge oracles.

mod body;
mod diagnostics;
mod parse;

pub use body::{Body, ConvexityClass, GaugeFn, POSITIVITY_FLOOR, POSITIVITY_PROBES};
pub(crate) use body::{EllipsoidFactor, Shape};
pub use diagnostics::{aoki_rolewicz_exponent, aoki_rolewicz_gauge, quasi_constant};
pub use parse::{parse_body, read_matrix_file};
