use rand::Rng;

use crate::bodies::Body;
use crate::error::{invalid, Result};
use crate::linalg::{axpy, norm};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Coordinates used for the deterministic `±e_i ± e_j` pairs.
const AXIS_PAIR_LIMIT: usize = 32;

fn random_direction<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R, out: &mut [T]) {
    out.iter_mut().for_each(|v| *v = T::zero());
    if rng.random_bool(0.5) {
        for v in out.iter_mut() {
            *v = T::standard_normal(rng);
        }
    } else {
        let support = rng.random_range(1..=n.min(3));
        for _ in 0..support {
            out[rng.random_range(0..n)] = T::standard_normal(rng);
        }
    }
    if out.iter().all(|v| *v == T::zero()) {
        out[0] = T::one();
    }
}

/// Lower estimate of the quasi-convexity constant `sup ‖x+y‖ / max(‖x‖, ‖y‖)`.
///
/// Takes the sup over the axis pairs `(e_i, ±e_j)` among the first 32
/// coordinates (which include `y = x`) and `budget` seeded random pairs, half
/// dense gaussian and half sparse. The random pairs are a prefix of one seeded
/// sequence, so the estimate is nondecreasing in `budget`.
pub fn quasi_constant<T: Scalar>(body: &Body<T>, budget: usize, seed: u64) -> Result<T> {
    if budget == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    let n = body.dim();
    let mut best = T::one();
    let mut ratio = |x: &[T], y: &[T]| {
        let s: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a + b).collect();
        let denom = body.gauge_unchecked(x).max(body.gauge_unchecked(y));
        if denom > T::zero() {
            let r = body.gauge_unchecked(&s) / denom;
            if r > best {
                best = r;
            }
        }
    };

    let m = n.min(AXIS_PAIR_LIMIT);
    let mut x = vec![T::zero(); n];
    let mut y = vec![T::zero(); n];
    for i in 0..m {
        for j in i..m {
            for sign in [T::one(), -T::one()] {
                x.iter_mut().for_each(|v| *v = T::zero());
                y.iter_mut().for_each(|v| *v = T::zero());
                x[i] = T::one();
                y[j] += sign;
                ratio(&x, &y);
            }
        }
    }

    let mut rng = RngStream::new(seed).fork("quasi_constant").rng();
    for _ in 0..budget {
        random_direction(n, &mut rng, &mut x);
        random_direction(n, &mut rng, &mut y);
        ratio(&x, &y);
    }
    Ok(best)
}

/// Exponent `q` of the Aoki–Rolewicz envelope for a body with `K + K ⊂ cK`: `2^{1/q} = 2c`.
pub fn aoki_rolewicz_exponent<T: Scalar>(c: T) -> T {
    let two = T::lit(2.0);
    two.ln() / (two * c).ln()
}

const GOLDEN_SCAN: usize = 16;
const GOLDEN_STEPS: usize = 24;
const RANDOM_SPLITS: usize = 4;
const AXIS_SPLIT_LIMIT: usize = 8;

struct Envelope<'a, T: Scalar> {
    body: &'a Body<T>,
    q: T,
    directions: Vec<Vec<T>>,
}

impl<T: Scalar> Envelope<'_, T> {
    fn combine(&self, a: T, b: T) -> T {
        if a == T::zero() {
            return b;
        }
        if b == T::zero() {
            return a;
        }
        (a.powf(self.q) + b.powf(self.q)).powf(T::one() / self.q)
    }

    fn split_value(&self, x: &[T], v: &[T], s: T, depth: usize) -> T {
        let mut rest = x.to_vec();
        axpy(-s, v, &mut rest);
        let part: Vec<T> = v.iter().map(|&c| c * s).collect();
        self.combine(self.body.gauge_unchecked(&part), self.value(&rest, depth - 1))
    }

    /// Best split along `v`: coarse scan of `s ∈ [-2|x|, 2|x|]`, then golden-section
    /// refinement inside the bracket around the best scan point.
    fn best_split(&self, x: &[T], v: &[T], depth: usize, extra: Option<T>) -> T {
        let radius = T::lit(2.0) * norm(x);
        let step = T::lit(2.0) * radius / T::of_usize(GOLDEN_SCAN);
        let mut best_s = -radius;
        let mut best = T::infinity();
        for i in 0..=GOLDEN_SCAN {
            let s = -radius + step * T::of_usize(i);
            let f = self.split_value(x, v, s, depth);
            if f < best {
                best = f;
                best_s = s;
            }
        }
        if let Some(s) = extra {
            best = best.min(self.split_value(x, v, s, depth));
        }
        let inv_phi = T::lit(0.618_033_988_749_894_9);
        let (mut lo, mut hi) = (best_s - step, best_s + step);
        let mut a = hi - inv_phi * (hi - lo);
        let mut b = lo + inv_phi * (hi - lo);
        let mut fa = self.split_value(x, v, a, depth);
        let mut fb = self.split_value(x, v, b, depth);
        for _ in 0..GOLDEN_STEPS {
            if fa < fb {
                hi = b;
                b = a;
                fb = fa;
                a = hi - inv_phi * (hi - lo);
                fa = self.split_value(x, v, a, depth);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + inv_phi * (hi - lo);
                fb = self.split_value(x, v, b, depth);
            }
        }
        best.min(fa).min(fb)
    }

    fn value(&self, x: &[T], depth: usize) -> T {
        let trivial = self.body.gauge_unchecked(x);
        if depth <= 1 || trivial == T::zero() {
            return trivial;
        }
        let mut best = self.value(x, depth - 1);
        let n = x.len();
        let mut axis = vec![T::zero(); n];
        for i in 0..n.min(AXIS_SPLIT_LIMIT) {
            axis.iter_mut().for_each(|v| *v = T::zero());
            axis[i] = T::one();
            best = best.min(self.best_split(x, &axis, depth, Some(x[i])));
        }
        for v in &self.directions {
            best = best.min(self.best_split(x, v, depth, None));
        }
        best
    }
}

/// Upper estimate of the gauge of the Aoki–Rolewicz `q`-convex envelope,
/// `inf (Σ ‖x_i‖^q)^{1/q}` over decompositions `x = Σ x_i` with at most `depth`
/// parts, where `2^{1/q} = 2c` and `c` is the body's quasi-convexity constant.
///
/// Each extra level tries two-part splits along the first coordinate axes and
/// a few fixed random directions, recursing on the remainder. The result is
/// nonincreasing in `depth` and never exceeds `‖x‖_K`. Cost grows like
/// `(splits · evaluations)^(depth-1)`, so depth beyond 3 is slow.
pub fn aoki_rolewicz_gauge<T: Scalar>(body: &Body<T>, x: &[T], depth: usize) -> Result<T> {
    if depth < 1 {
        return Err(invalid("depth must be at least 1"));
    }
    body.check_point(x)?;
    let c = body
        .class()
        .sum_constant()
        .ok_or_else(|| invalid("Aoki-Rolewicz envelope needs a quasi-convex or p-convex body"))?;
    let n = body.dim();
    let mut rng = RngStream::with_stream(0xA0C1, 0x0ED1).rng();
    let directions = (0..RANDOM_SPLITS)
        .map(|_| {
            let mut v: Vec<T> = (0..n).map(|_| T::standard_normal(&mut rng)).collect();
            let r = norm(&v);
            v.iter_mut().for_each(|c| *c /= r);
            v
        })
        .collect();
    let env = Envelope { body, q: aoki_rolewicz_exponent(c), directions };
    Ok(env.value(x, depth))
}
