use rand::Rng;

use crate::bodies::Body;
use crate::error::{invalid, Error, Result};
use crate::functionals::sampling::{gaussian_into, map_body_samples, sample_body_uniform};
use crate::linalg::{dot, norm};
use crate::rng::{map_shards, RngStream, SHARD_SIZE};
use crate::scalar::Scalar;

/// Streaming mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub count: u64,
    pub mean: T,
    m2: T,
}

impl<T: Scalar> Default for Moments<T> {
    fn default() -> Self {
        Self { count: 0, mean: T::zero(), m2: T::zero() }
    }
}

impl<T: Scalar> Moments<T> {
    pub fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / T::lit(self.count as f64);
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = T::lit(self.count as f64);
        let n2 = T::lit(other.count as f64);
        let total = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * n2 / total;
        self.m2 += other.m2 + delta * delta * n1 * n2 / total;
        self.count += other.count;
    }

    pub fn sample_variance(&self) -> T {
        if self.count < 2 {
            T::zero()
        } else {
            self.m2 / T::lit((self.count - 1) as f64)
        }
    }

    pub fn estimate(&self, seed: u64) -> McEstimate<T> {
        McEstimate {
            value: self.mean,
            std_error: (self.sample_variance() / T::lit(self.count as f64)).sqrt(),
            samples: self.count,
            seed,
        }
    }

    fn merged(parts: Vec<Self>) -> Self {
        let mut acc = Self::default();
        for p in &parts {
            acc.merge(p);
        }
        acc
    }
}

/// A Monte Carlo estimate: point value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub value: T,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: T,
    pub samples: u64,
    pub seed: u64,
}

impl<T: Scalar> McEstimate<T> {
    /// `value ± k·std_error`.
    pub fn interval(&self, k: T) -> (T, T) {
        (self.value - k * self.std_error, self.value + k * self.std_error)
    }

    /// `|self − other| ≤ k·sqrt(se₁² + se₂²)`.
    pub fn agrees_with(&self, other: &Self, k: T) -> bool {
        let se = (self.std_error * self.std_error + other.std_error * other.std_error).sqrt();
        (self.value - other.value).abs() <= k * se
    }

    pub const CSV_HEADER: [&'static str; 4] = ["value", "std_error", "samples", "seed"];

    pub fn csv_fields(&self) -> [String; 4] {
        [
            format!("{:?}", self.value.as_f64()),
            format!("{:?}", self.std_error.as_f64()),
            self.samples.to_string(),
            self.seed.to_string(),
        ]
    }
}

fn require_samples(count: usize) -> Result<()> {
    if count < 2 {
        return Err(invalid("need at least 2 samples"));
    }
    Ok(())
}

/// Mean of `f(g)` over standard gaussian vectors `g ∈ R^n`, sharded.
fn gaussian_mean<T, F>(n: usize, count: usize, stream: RngStream, f: F) -> Moments<T>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync + Send,
{
    let parts = map_shards(count, SHARD_SIZE, stream, |range, rng| {
        let mut m = Moments::default();
        let mut g = vec![T::zero(); n];
        for _ in range {
            loop {
                gaussian_into(rng, &mut g);
                if g.iter().any(|v| *v != T::zero()) {
                    break;
                }
            }
            m.push(f(&g));
        }
        m
    });
    Moments::merged(parts)
}

/// `M_K`: mean of the gauge over the euclidean unit sphere.
///
/// Each sample is `‖g‖_K / |g|` for a gaussian `g`, i.e. the gauge at the
/// uniform sphere point `g/|g|`.
pub fn estimate_m<T: Scalar>(body: &Body<T>, count: usize, stream: RngStream) -> Result<McEstimate<T>> {
    require_samples(count)?;
    let m = gaussian_mean(body.dim(), count, stream, |g| body.gauge_unchecked(g) / norm(g));
    Ok(m.estimate(stream.seed))
}

/// `M*_K = M_{K°}`: mean of the support function over the sphere.
///
/// Bodies without a closed-form support function use the max over one uniform
/// cloud of `cloud_size` points (so this is the value for the convex hull, and a
/// lower estimate).
pub fn estimate_m_star<T: Scalar>(
    body: &Body<T>,
    count: usize,
    stream: RngStream,
    cloud_size: usize,
) -> Result<McEstimate<T>> {
    require_samples(count)?;
    let n = body.dim();
    let probe = vec![T::one(); n];
    let m = if body.support_closed_form(&probe).is_some() {
        gaussian_mean(n, count, stream, |g| {
            body.support_closed_form(g).expect("closed form checked above") / norm(g)
        })
    } else {
        let cloud = sample_body_uniform(body, cloud_size.max(1), stream.fork("support-cloud"))?;
        gaussian_mean(n, count, stream, |g| {
            cloud.iter().map(|x| dot(g, x)).fold(T::neg_infinity(), T::max) / norm(g)
        })
    };
    Ok(m.estimate(stream.seed))
}

/// `M(K, B) = (1/|K|) ∫_K ‖x‖_B dx`, the mean `B`-gauge of a uniform point of `K`.
/// With `B` the euclidean ball this is `M̃_K`.
pub fn estimate_mkb<T: Scalar>(
    k: &Body<T>,
    b: &Body<T>,
    count: usize,
    stream: RngStream,
) -> Result<McEstimate<T>> {
    require_samples(count)?;
    if k.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: b.dim() });
    }
    let parts = map_body_samples(k, count, stream, |points| {
        let mut m = Moments::default();
        for x in points {
            m.push(b.gauge_unchecked(&x));
        }
        m
    })?;
    Ok(Moments::merged(parts).estimate(stream.seed))
}

/// `M̃_K = E|x|` for uniform `x ∈ K`; exact where the body has a closed form.
pub fn estimate_mean_norm<T: Scalar>(k: &Body<T>, count: usize, stream: RngStream) -> Result<McEstimate<T>> {
    if let Some(v) = k.mean_norm_closed_form() {
        return Ok(McEstimate { value: v, std_error: T::zero(), samples: 0, seed: stream.seed });
    }
    require_samples(count)?;
    let parts = map_body_samples(k, count, stream, |points| {
        let mut m = Moments::default();
        for x in points {
            m.push(norm(&x));
        }
        m
    })?;
    Ok(Moments::merged(parts).estimate(stream.seed))
}

/// `A(n, k) = sqrt(n/k) ∫_{S^{n-1}} |(x_1..x_k)| dσ`
/// `= sqrt(n/k) Γ((k+1)/2) Γ(n/2) / (Γ(k/2) Γ((n+1)/2))`.
pub fn factor_a<T: Scalar>(n: usize, k: usize) -> Result<T> {
    if k == 0 || k > n {
        return Err(invalid(format!("factor A needs 1 <= k <= n, got n={n}, k={k}")));
    }
    if k == n {
        return Ok(T::one());
    }
    let half = T::lit(0.5);
    let (nf, kf) = (T::of_usize(n), T::of_usize(k));
    let ln = ((kf + T::one()) * half).log_gamma() - ((nf + T::one()) * half).log_gamma()
        + (nf * half).log_gamma()
        - (kf * half).log_gamma();
    Ok((nf / kf).sqrt() * ln.exp())
}

fn c_theta_ratio<T: Scalar>(body: &Body<T>, theta: T, x: &[T], y: &[T]) -> Option<T> {
    let plus: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a + b).collect();
    let minus: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    let den = body.gauge_unchecked(x).powf(theta) + body.gauge_unchecked(y).powf(theta);
    if den == T::zero() {
        return None;
    }
    let num = body.gauge_unchecked(&plus).powf(theta) + body.gauge_unchecked(&minus).powf(theta);
    Some((num / (T::lit(2.0) * den)).powf(T::one() / theta))
}

/// Lower estimate of the best constant `c_θ` with
/// `‖x+y‖^θ + ‖x−y‖^θ ≤ 2 c_θ^θ (‖x‖^θ + ‖y‖^θ)`.
///
/// Sup of the pair ratio over `(x, 0)` (ratio exactly 1), axis pairs among the
/// first 32 coordinates, and `budget` seeded random pairs (a prefix of one
/// sequence, so nondecreasing in `budget`).
pub fn estimate_c_theta<T: Scalar>(body: &Body<T>, theta: T, budget: usize, stream: RngStream) -> Result<T> {
    if !(theta > T::zero()) {
        return Err(invalid(format!("theta must be positive, got {theta}")));
    }
    if budget == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    let n = body.dim();
    let mut best = T::one();
    let mut x = vec![T::zero(); n];
    let mut y = vec![T::zero(); n];
    let m = n.min(32);
    for i in 0..m {
        for j in i + 1..m {
            x.iter_mut().for_each(|v| *v = T::zero());
            y.iter_mut().for_each(|v| *v = T::zero());
            x[i] = T::one();
            y[j] = T::one();
            if let Some(r) = c_theta_ratio(body, theta, &x, &y) {
                best = best.max(r);
            }
        }
    }
    let mut rng = stream.fork("c_theta").rng();
    for _ in 0..budget {
        for v in [&mut x, &mut y] {
            if rng.random_bool(0.5) {
                gaussian_into(&mut rng, v);
            } else {
                v.iter_mut().for_each(|c| *c = T::zero());
                for _ in 0..rng.random_range(1..=n.min(3)) {
                    v[rng.random_range(0..n)] = T::standard_normal(&mut rng);
                }
            }
        }
        if let Some(r) = c_theta_ratio(body, theta, &x, &y) {
            best = best.max(r);
        }
    }
    Ok(best)
}
