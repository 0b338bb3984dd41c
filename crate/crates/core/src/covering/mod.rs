//! Covering and packing numbers under arbitrary gauges, entropy numbers, and the
//! analytic covering bounds.

mod bounds;
mod entropy;
mod net;

pub use bounds::{
    absorption_check, absorption_radius, lemma2_bound, lemma4_bound, lemma4_formula, lemma4_implied_constant,
    volume_lower, Absorption, LEMMA2_CONSTANT,
};
pub use entropy::{entropy_number, entropy_number_in, EntropyEstimate};
pub use net::{
    covering_from_centers, greedy_net, greedy_net_with, write_points, CoverOptions, CoverSession, CoveringReport,
    COVER_TOLERANCE, DEFAULT_CENTER_CAP, REFINE_MAX_CENTERS,
};
