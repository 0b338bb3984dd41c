//! Numerical laboratory for quasi-convex and p-convex bodies: gauges, averaged
//! functionals, random projections, covering numbers, and experiment drivers.

pub mod bodies;
pub mod calibration;
pub mod covering;
pub mod error;
pub mod explorer;
pub mod functionals;
pub mod linalg;
pub mod projections;
pub mod rng;
pub mod scalar;

pub use bodies::{parse_body, Body, ConvexityClass};
pub use error::{Error, Result};
pub use functionals::McEstimate;
pub use projections::{JlReport, ProjectionOp};
pub use rng::RngStream;
pub use scalar::Scalar;

pub type Body64 = Body<f64>;
pub type Body32 = Body<f32>;
pub type ConvexityClass64 = ConvexityClass<f64>;
pub type McEstimate64 = McEstimate<f64>;
pub type ProjectionOp64 = ProjectionOp<f64>;
