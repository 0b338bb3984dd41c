//! Seeded samplers and Monte Carlo estimators of the scalar functionals.

mod estimate;
mod sampling;

pub use estimate::{
    estimate_c_theta, estimate_m, estimate_m_star, estimate_mean_norm, estimate_mkb, factor_a, McEstimate, Moments,
};
#[allow(unused_imports)]
pub(crate) use sampling::{gaussian_into, map_body_samples, sphere_point_into};
pub use sampling::{sample_body_uniform, sample_sphere, REJECTION_MAX_DIM, REJECTION_MAX_PROPOSALS};
