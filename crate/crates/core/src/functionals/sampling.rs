use rand::Rng;
use rand_distr::Distribution;

use crate::bodies::{Body, EllipsoidFactor, Shape};
use crate::error::{invalid, Error, Result};
use crate::linalg::{norm, scale_in_place};
use crate::rng::{map_shards, RngStream, SHARD_SIZE};
use crate::scalar::Scalar;

/// Largest dimension served by the bounding-box rejection fallback.
pub const REJECTION_MAX_DIM: usize = 6;
/// Proposal budget of one rejection-sampling call.
pub const REJECTION_MAX_PROPOSALS: u64 = 100_000_000;

pub(crate) fn gaussian_into<T: Scalar, R: Rng + ?Sized>(rng: &mut R, out: &mut [T]) {
    for v in out.iter_mut() {
        *v = T::standard_normal(rng);
    }
}

/// Fills `out` with a uniform point of the euclidean unit sphere.
pub(crate) fn sphere_point_into<T: Scalar, R: Rng + ?Sized>(rng: &mut R, out: &mut [T]) {
    loop {
        gaussian_into(rng, out);
        let r = norm(out);
        if r > T::zero() {
            out.iter_mut().for_each(|v| *v = *v / r);
            return;
        }
    }
}

/// `count` points of `S^{n-1}` under the normalized rotation-invariant measure
/// (normalized gaussian vectors). Sharded, so the list depends only on `stream`.
pub fn sample_sphere<T: Scalar>(n: usize, count: usize, stream: RngStream) -> Result<Vec<Vec<T>>> {
    if n == 0 || count == 0 {
        return Err(invalid("sample_sphere needs n >= 1 and count >= 1"));
    }
    let shards = map_shards(count, SHARD_SIZE, stream, |range, rng| {
        range
            .map(|_| {
                let mut x = vec![T::zero(); n];
                sphere_point_into(rng, &mut x);
                x
            })
            .collect::<Vec<_>>()
    });
    Ok(shards.into_iter().flatten().collect())
}

/// Uniform point of the unit ball of `ℓ_p^n`: `x_i = s_i (G_i / (Σ G_j + W))^{1/p}`
/// with `G_i ~ Gamma(1/p)`, random signs `s_i` and `W ~ Exp(1)`.
/// (`G^{1/p}` has density proportional to `exp(-t^p)`.)
fn lp_point_into<T: Scalar, R: Rng + ?Sized>(p: T, gamma: &T::GammaDist, rng: &mut R, out: &mut [T]) {
    let mut total = T::standard_exp(rng);
    for v in out.iter_mut() {
        let g = gamma.sample(rng);
        *v = g;
        total += g;
    }
    let inv_p = T::one() / p;
    for v in out.iter_mut() {
        let ratio = *v / total;
        let mag = if p == T::one() {
            ratio
        } else if p == T::lit(2.0) {
            ratio.sqrt()
        } else if p == T::lit(0.5) {
            ratio * ratio
        } else {
            ratio.powf(inv_p)
        };
        *v = if rng.random_bool(0.5) { mag } else { -mag };
    }
}

/// Per-body sampling plan, resolved once per call.
enum Plan<'a, T: Scalar> {
    Lp { p: T, gamma: T::GammaDist },
    Diagonal { plan: Box<Plan<'a, T>>, sqrt_d: &'a [T] },
    Dense { plan: Box<Plan<'a, T>>, chol: &'a crate::linalg::Matrix<T> },
    Scaled { plan: Box<Plan<'a, T>>, factor: T },
    Mapped { plan: Box<Plan<'a, T>>, map: &'a crate::linalg::Matrix<T> },
    Reject { body: &'a Body<T>, radius: T },
}

fn plan<T: Scalar>(body: &Body<T>) -> Result<Plan<'_, T>> {
    let two = T::lit(2.0);
    let ball = || Plan::Lp { p: two, gamma: T::gamma(T::lit(0.5)) };
    Ok(match body.shape() {
        Shape::Lp { p } => Plan::Lp { p: *p, gamma: T::gamma(T::one() / *p) },
        Shape::Ellipsoid(EllipsoidFactor::Diagonal(s)) => {
            Plan::Diagonal { plan: Box::new(ball()), sqrt_d: s }
        }
        Shape::Ellipsoid(EllipsoidFactor::Dense { chol, .. }) => Plan::Dense { plan: Box::new(ball()), chol },
        Shape::Scaled { inner, factor } => Plan::Scaled { plan: Box::new(plan(inner)?), factor: *factor },
        Shape::LinearImage { inner, map, .. } => Plan::Mapped { plan: Box::new(plan(inner)?), map },
        Shape::Oracle { radius, .. } => {
            if body.dim() > REJECTION_MAX_DIM {
                return Err(Error::Unsamplable(format!(
                    "{}: rejection fallback limited to dimension {REJECTION_MAX_DIM}",
                    body.label()
                )));
            }
            let radius = radius.ok_or_else(|| {
                Error::Unsamplable(format!("{}: oracle body without a bounding radius", body.label()))
            })?;
            Plan::Reject { body, radius }
        }
    })
}

impl<T: Scalar> Plan<'_, T> {
    /// Writes one uniform point into `out`; returns the number of proposals used.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [T], budget: u64) -> Result<u64> {
        match self {
            Plan::Lp { p, gamma } => {
                lp_point_into(*p, gamma, rng, out);
                Ok(1)
            }
            Plan::Diagonal { plan, sqrt_d } => {
                let used = plan.draw(rng, out, budget)?;
                for (v, s) in out.iter_mut().zip(sqrt_d.iter()) {
                    *v /= *s;
                }
                Ok(used)
            }
            Plan::Dense { plan, chol } => {
                let used = plan.draw(rng, out, budget)?;
                let x = chol.solve_lower_transpose(out);
                out.copy_from_slice(&x);
                Ok(used)
            }
            Plan::Scaled { plan, factor } => {
                let used = plan.draw(rng, out, budget)?;
                scale_in_place(out, *factor);
                Ok(used)
            }
            Plan::Mapped { plan, map } => {
                let used = plan.draw(rng, out, budget)?;
                let x = map.matvec(out);
                out.copy_from_slice(&x);
                Ok(used)
            }
            Plan::Reject { body, radius } => {
                let two = T::lit(2.0);
                let mut used = 0;
                loop {
                    if used >= budget {
                        return Err(Error::TooThin { proposals: used });
                    }
                    used += 1;
                    for v in out.iter_mut() {
                        *v = (two * T::unit(rng) - T::one()) * *radius;
                    }
                    if body.gauge_unchecked(out) <= T::one() {
                        return Ok(used);
                    }
                }
            }
        }
    }
}

/// Runs `f` over uniform samples of `body`, shard by shard; results in shard order.
pub(crate) fn map_body_samples<T, A, F>(body: &Body<T>, count: usize, stream: RngStream, f: F) -> Result<Vec<A>>
where
    T: Scalar,
    A: Send,
    F: Fn(&mut dyn Iterator<Item = Vec<T>>) -> A + Sync + Send,
{
    let plan = plan(body)?;
    let n = body.dim();
    let shards = map_shards(count, SHARD_SIZE, stream, |range, rng| {
        let len = range.len() as u64;
        let mut budget = (REJECTION_MAX_PROPOSALS.saturating_mul(len) / count.max(1) as u64).max(1000);
        let mut failure = None;
        let mut points = (0..len).map_while(|_| {
            let mut x = vec![T::zero(); n];
            match plan.draw(rng, &mut x, budget) {
                Ok(used) => {
                    budget -= used.min(budget);
                    Some(x)
                }
                Err(e) => {
                    failure = Some(e);
                    None
                }
            }
        });
        let out = f(&mut points);
        drop(points);
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    });
    shards.into_iter().collect()
}

/// `count` uniform points of `body`. Exact for ℓ_p balls (any `p > 0`), ellipsoids,
/// and their dilates and linear images; bounding-box rejection for oracle bodies
/// in dimension at most 6.
pub fn sample_body_uniform<T: Scalar>(body: &Body<T>, count: usize, stream: RngStream) -> Result<Vec<Vec<T>>> {
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    let shards = map_body_samples(body, count, stream, |it| it.collect::<Vec<_>>())?;
    let points: Vec<Vec<T>> = shards.into_iter().flatten().collect();
    if points.len() != count {
        // a shard stopped early without reporting; cannot happen unless the plan misbehaves
        return Err(Error::TooThin { proposals: REJECTION_MAX_PROPOSALS });
    }
    Ok(points)
}
