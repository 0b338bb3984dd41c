use rayon::prelude::*;

use crate::bodies::Body;
use crate::covering::net::{CoveringReport, COVER_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::functionals::{sample_body_uniform, sample_sphere};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Displayed absolute constant of the euclidean-ball covering bound.
pub const LEMMA2_CONSTANT: f64 = 2.0;

fn check_dims<T: Scalar>(k: &Body<T>, b: &Body<T>) -> Result<()> {
    if k.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: b.dim() });
    }
    Ok(())
}

fn positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite")))
    }
}

/// Volumetric lower bound `|K| / (tⁿ|B|)` for `N(K, tB)`.
pub fn volume_lower<T: Scalar>(k: &Body<T>, b: &Body<T>, t: T) -> Result<T> {
    check_dims(k, b)?;
    positive("t", t)?;
    let n = T::of_usize(k.dim());
    Ok((k.ln_volume()? - n * t.ln() - b.ln_volume()?).exp())
}

fn sum_constant<T: Scalar>(body: &Body<T>) -> Result<T> {
    body.class()
        .sum_constant()
        .ok_or_else(|| invalid(format!("{} is only declared star-shaped; no constant a with K + K ⊂ aK", body.label())))
}

/// `2·exp(c·n·(a·M_K/t)²)` with `a` the sum constant of `k`'s class.
pub fn lemma2_bound<T: Scalar>(k: &Body<T>, m_k: T, t: T, c_abs: T) -> Result<T> {
    positive("t", t)?;
    positive("M_K", m_k)?;
    positive("c", c_abs)?;
    let a = sum_constant(k)?;
    let n = T::of_usize(k.dim());
    Ok(T::lit(2.0) * (c_abs * n * (a * m_k / t).powi(2)).exp())
}

/// `2·c_θⁿ·exp((c·n/θ)·(a·M(K,B)/t)^θ)` with `a` the sum constant of `b`'s class.
#[allow(clippy::too_many_arguments)]
pub fn lemma4_bound<T: Scalar>(
    k: &Body<T>,
    b: &Body<T>,
    m_kb: T,
    t: T,
    theta: T,
    c_theta: T,
    c_abs: T,
) -> Result<T> {
    check_dims(k, b)?;
    let a = sum_constant(b)?;
    lemma4_formula(k.dim(), a, m_kb, t, theta, c_theta, c_abs)
}

/// The same bound with the sum constant given explicitly.
pub fn lemma4_formula<T: Scalar>(n: usize, a: T, m_kb: T, t: T, theta: T, c_theta: T, c_abs: T) -> Result<T> {
    for (name, v) in [("M(K,B)", m_kb), ("t", t), ("theta", theta), ("c_theta", c_theta), ("c", c_abs), ("a", a)] {
        positive(name, v)?;
    }
    let nf = T::of_usize(n);
    Ok(T::lit(2.0) * c_theta.powf(nf) * (c_abs * nf / theta * (a * m_kb / t).powf(theta)).exp())
}

/// Smallest `c` making `count ≤ 2c_θⁿ exp((c·n/θ)(a·M/t)^θ)` hold; zero when any
/// `c ≥ 0` works.
pub fn lemma4_implied_constant<T: Scalar>(count: usize, n: usize, a: T, m_kb: T, t: T, theta: T, c_theta: T) -> T {
    let nf = T::of_usize(n);
    let excess = (T::of_usize(count) / (T::lit(2.0) * c_theta.powf(nf))).ln();
    if excess <= T::zero() {
        return T::zero();
    }
    excess * theta / (nf * (a * m_kb / t).powf(theta))
}

/// `t_r = (1 − r^p)^{−1/p}`.
pub fn absorption_radius<T: Scalar>(p: T, r: T) -> Result<T> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(invalid("p must lie in (0, 1]"));
    }
    if !(r > T::zero() && r < T::one()) {
        return Err(invalid("r must lie in (0, 1)"));
    }
    Ok((T::one() - r.powf(p)).powf(-T::one() / p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption<T> {
    pub holds: bool,
    pub t_r: T,
    /// Largest `‖y‖_K` over the sample of `B`.
    pub max_gauge: T,
}

/// Given a covering of `B` by translates `x_i + K` with every `x_i ∈ rB` and `K`
/// p-convex, checks `B ⊂ t_r K` on a dense sample of `B` (uniform points plus
/// boundary points).
pub fn absorption_check<T: Scalar>(
    b: &Body<T>,
    k: &Body<T>,
    r: T,
    covering: &CoveringReport<T>,
    sample_size: usize,
    stream: RngStream,
) -> Result<Absorption<T>> {
    check_dims(k, b)?;
    let p = k
        .class()
        .p()
        .ok_or_else(|| Error::PreconditionViolated(format!("{} is not declared p-convex", k.label())))?;
    let t_r = absorption_radius(p.min(T::one()), r)?;
    let tol = T::lit(COVER_TOLERANCE);
    if covering.t > T::one() + tol {
        return Err(Error::PreconditionViolated(format!(
            "covering radius {:?} exceeds one translate of K",
            covering.t.as_f64()
        )));
    }
    for (i, c) in covering.centers.iter().enumerate() {
        if b.gauge(c)? > r * (T::one() + tol) {
            return Err(Error::PreconditionViolated(format!("center {i} is not in rB")));
        }
    }
    let mut sample = sample_body_uniform(b, sample_size, stream.fork("absorb-uniform"))?;
    for mut u in sample_sphere::<T>(b.dim(), sample_size, stream.fork("absorb-boundary"))? {
        let g = b.gauge_unchecked(&u);
        u.iter_mut().for_each(|v| *v = *v / g);
        sample.push(u);
    }
    let max_gauge = sample.par_iter().map(|y| k.gauge_unchecked(y)).reduce(T::zero, T::max);
    Ok(Absorption { holds: max_gauge <= t_r * (T::one() + tol), t_r, max_gauge })
}
