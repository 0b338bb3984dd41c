use crate::bodies::Body;
use crate::covering::net::{CoverOptions, CoverSession};
use crate::error::{invalid, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate<T> {
    pub k: usize,
    pub e_k: T,
    pub bracket: (T, T),
}

impl<T: Scalar> EntropyEstimate<T> {
    pub const CSV_HEADER: [&'static str; 4] = ["k", "e_k", "lower", "upper"];

    pub fn csv_fields(&self) -> [String; 4] {
        [
            self.k.to_string(),
            format!("{:?}", self.e_k.as_f64()),
            format!("{:?}", self.bracket.0.as_f64()),
            format!("{:?}", self.bracket.1.as_f64()),
        ]
    }
}

/// `e_k(outer, inner) = inf{ε : N(outer, ε·inner) ≤ 2^{k−1}}`, by bisection on a
/// fixed dyadic grid over `[0, max ‖x‖_inner]` with covering counts from one shared
/// cloud. Because the grid and counts do not depend on `k`, estimates are
/// nonincreasing in `k`.
pub fn entropy_number<T: Scalar>(
    outer: &Body<T>,
    inner: &Body<T>,
    k: usize,
    tol: T,
    cloud_size: usize,
    stream: RngStream,
) -> Result<EntropyEstimate<T>> {
    let mut session = CoverSession::new(outer, inner, cloud_size, stream, CoverOptions::default())?;
    entropy_number_in(&mut session, k, tol)
}

/// Entropy number over an existing covering session, so several `k` share one cloud.
pub fn entropy_number_in<T: Scalar>(session: &mut CoverSession<'_, T>, k: usize, tol: T) -> Result<EntropyEstimate<T>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if !(tol > T::zero()) {
        return Err(invalid("tol must be positive"));
    }
    let budget = if k > 64 { usize::MAX } else { 1usize << (k - 1) };
    let top = session.max_radius();
    let mut hi = top;
    let mut lo = T::zero();
    let steps = (top / tol).log2().ceil().max(T::zero()).to_usize().unwrap_or(0);
    for _ in 0..steps {
        let mid = (lo + hi) / T::lit(2.0);
        if mid > T::zero() && session.cover(mid)?.upper_count <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EntropyEstimate { k, e_k: (lo + hi) / T::lit(2.0), bracket: (lo, hi) })
}
