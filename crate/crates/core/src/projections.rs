//! Haar-random orthogonal projections and the empirical concentration harness.

use rand::Rng;

use crate::calibration;
use crate::error::{invalid, Error, Result};
use crate::functionals::factor_a;
use crate::linalg::{axpy, dot, haar_frame, norm, orthogonalize, orthonormal_complement, scale_in_place};
use crate::rng::{map_trials, RngStream};
use crate::scalar::Scalar;

/// Rank-`k` orthogonal projection of `R^n`, stored as an orthonormal basis of its range.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionOp<T> {
    ambient_dim: usize,
    basis: Vec<Vec<T>>,
}

impl<T: Scalar> ProjectionOp<T> {
    /// Checks orthonormality to `1e-10`.
    pub fn from_basis(ambient_dim: usize, basis: Vec<Vec<T>>) -> Result<Self> {
        if basis.len() > ambient_dim {
            return Err(invalid("more basis vectors than the ambient dimension"));
        }
        if let Some(bad) = basis.iter().find(|b| b.len() != ambient_dim) {
            return Err(Error::DimensionMismatch { expected: ambient_dim, got: bad.len() });
        }
        let op = Self { ambient_dim, basis };
        if op.gram_error() > T::tol(1e-10) {
            return Err(invalid("basis is not orthonormal"));
        }
        Ok(op)
    }

    pub fn identity(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                e
            })
            .collect();
        Self { ambient_dim: n, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    /// Max deviation of the basis Gram matrix from the identity.
    pub fn gram_error(&self) -> T {
        let mut worst = T::zero();
        for (i, u) in self.basis.iter().enumerate() {
            for (j, v) in self.basis.iter().enumerate().skip(i) {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((dot(u, v) - target).abs());
            }
        }
        worst
    }

    /// Coordinates of `Px` in the stored basis.
    pub fn coords(&self, x: &[T]) -> Vec<T> {
        self.basis.iter().map(|b| dot(b, x)).collect()
    }

    /// The point of `R^n` with the given range coordinates.
    pub fn lift(&self, coords: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.ambient_dim];
        for (b, &c) in self.basis.iter().zip(coords) {
            axpy(c, b, &mut out);
        }
        out
    }

    /// `Px` in ambient coordinates.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.lift(&self.coords(x))
    }

    /// `|Px|`.
    pub fn image_norm(&self, x: &[T]) -> T {
        norm(&self.coords(x))
    }

    /// Projection onto the orthogonal complement of the range (the kernel).
    pub fn complement(&self) -> Self {
        Self { ambient_dim: self.ambient_dim, basis: orthonormal_complement(self.ambient_dim, &self.basis) }
    }
}

/// Projection onto a Haar-distributed `k`-dimensional subspace: a gaussian
/// `n × k` matrix orthonormalized by modified Gram–Schmidt with reorthogonalization.
pub fn haar_projection<T: Scalar, R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<ProjectionOp<T>> {
    if k == 0 || k > n {
        return Err(invalid(format!("projection rank must satisfy 1 <= k <= n, got n={n}, k={k}")));
    }
    Ok(ProjectionOp { ambient_dim: n, basis: haar_frame(n, k, rng) })
}

/// Haar-random orthogonal matrix, returned as its rows.
pub fn haar_orthogonal<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Vec<T>> {
    haar_frame(n, n, rng)
}

/// Outcome of repeated two-sided concentration checks
/// `A(1−ε)√(k/n)|y| ≤ |P y| ≤ A(1+ε)√(k/n)|y|` over Haar projections.
#[derive(Debug, Clone, PartialEq)]
pub struct JlReport {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub num_points: usize,
    pub trials: usize,
    /// Trials where at least one point left the band.
    pub failures: usize,
    pub empirical_failure: f64,
    pub seed: u64,
    /// `ε > √(c/k)` and `N < e^{ε²k/c}` for the calibrated constants.
    pub in_regime: bool,
}

impl JlReport {
    /// `√(π/2)·e^{−ε²k/c}`.
    pub fn bound_failure(&self, c: f64) -> f64 {
        (std::f64::consts::PI / 2.0).sqrt() * (-self.epsilon * self.epsilon * self.k as f64 / c).exp()
    }

    /// Binomial standard deviation of `empirical_failure`, with zero-failure cells
    /// counted as one pseudo-failure.
    pub fn binomial_sigma(&self) -> f64 {
        let t = self.trials as f64;
        let f = self.empirical_failure.max(1.0 / t);
        (f * (1.0 - f).max(0.0) / t).sqrt()
    }

    pub const CSV_HEADER: [&'static str; 7] = ["n", "k", "epsilon", "N", "trials", "empirical_failure", "seed"];

    pub fn csv_fields(&self) -> [String; 7] {
        [
            self.n.to_string(),
            self.k.to_string(),
            format!("{:?}", self.epsilon),
            self.num_points.to_string(),
            self.trials.to_string(),
            format!("{:?}", self.empirical_failure),
            self.seed.to_string(),
        ]
    }
}

/// Whether `(ε, k, N)` lies in the regime where the concentration bound is stated.
pub fn jl_in_regime(k: usize, epsilon: f64, num_points: usize) -> bool {
    let kf = k as f64;
    epsilon > (calibration::JL_REGIME_CONSTANT / kf).sqrt()
        && (num_points as f64) < (epsilon * epsilon * kf / calibration::JL_FAILURE_CONSTANT).exp()
}

/// Fraction of `trials` Haar projections of rank `k` for which some point leaves
/// the band `A(n,k)(1±ε)√(k/n)|y|`.
///
/// Each trial either draws the projection range directly or, when the points span
/// fewer dimensions, rotates their span by a Haar frame and projects on the first
/// `k` coordinates; both give the same joint law. Ranks above `n/2` are handled
/// through the complement, `|Py|² = |y|² − |P⊥y|²`.
pub fn jl_concentration<T: Scalar>(
    points: &[Vec<T>],
    k: usize,
    epsilon: T,
    trials: usize,
    stream: RngStream,
) -> Result<JlReport> {
    if !(epsilon > T::zero()) {
        return Err(invalid("epsilon must be positive"));
    }
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let n = points.first().map(|p| p.len()).ok_or_else(|| invalid("no points"))?;
    if k == 0 || k > n {
        return Err(invalid(format!("rank must satisfy 1 <= k <= n, got n={n}, k={k}")));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if p.iter().all(|v| *v == T::zero()) {
            return Err(Error::ZeroPoint(i));
        }
    }

    let a = factor_a::<T>(n, k)?;
    let scale = a * (T::of_usize(k) / T::of_usize(n)).sqrt();
    let sq_norms: Vec<T> = points.iter().map(|p| dot(p, p)).collect();
    let bands: Vec<(T, T)> = sq_norms
        .iter()
        .map(|&s| {
            let r = s.sqrt() * scale;
            let lo = (T::one() - epsilon).max(T::zero()) * r;
            let hi = (T::one() + epsilon) * r;
            (lo * lo, hi * hi)
        })
        .collect();

    // Orthonormal basis of span(points) and coefficients of each point in it.
    let mut span: Vec<Vec<T>> = Vec::new();
    for p in points {
        let mut v = p.clone();
        let before = norm(&v);
        let after = orthogonalize(&mut v, &span);
        if after > T::tol(1e-10) * before {
            scale_in_place(&mut v, T::one() / after);
            span.push(v);
        }
    }
    let coeffs: Vec<Vec<T>> = points.iter().map(|p| span.iter().map(|b| dot(b, p)).collect()).collect();
    let r = span.len();

    let use_complement = 2 * k > n;
    let kk = if use_complement { n - k } else { k };
    let rotate_span = r < kk;

    let failed = map_trials(trials, stream, |_, rng| {
        if kk == 0 {
            return false;
        }
        // squared norms of the k' "kept" coordinates of each point
        let kept: Vec<T> = if rotate_span {
            let frame: Vec<Vec<T>> = haar_frame(n, r, rng);
            let rows = if use_complement { k..n } else { 0..k };
            coeffs
                .iter()
                .map(|c| {
                    rows.clone()
                        .map(|m| {
                            let mut s = T::zero();
                            for (f, &ci) in frame.iter().zip(c) {
                                s += f[m] * ci;
                            }
                            s * s
                        })
                        .sum()
                })
                .collect()
        } else {
            let q: Vec<Vec<T>> = haar_frame(n, kk, rng);
            points.iter().map(|p| q.iter().map(|b| dot(b, p).powi(2)).sum()).collect()
        };
        kept.iter().zip(&sq_norms).zip(&bands).any(|((&s, &total), &(lo, hi))| {
            let img = if use_complement { (total - s).max(T::zero()) } else { s };
            img < lo || img > hi
        })
    });
    let failures = failed.iter().filter(|&&f| f).count();
    let eps = epsilon.as_f64();
    Ok(JlReport {
        n,
        k,
        epsilon: eps,
        num_points: points.len(),
        trials,
        failures,
        empirical_failure: failures as f64 / trials as f64,
        seed: stream.seed,
        in_regime: jl_in_regime(k, eps, points.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::sample_sphere;

    #[test]
    fn identity_rank_preserves_norms() {
        let mut rng = RngStream::new(1).rng();
        let p: ProjectionOp<f64> = haar_projection(6, 6, &mut rng).unwrap();
        for x in sample_sphere::<f64>(6, 100, RngStream::new(2)).unwrap() {
            assert!((p.image_norm(&x) - 1.0).abs() < 1e-12);
        }
        assert!(haar_projection::<f64, _>(4, 0, &mut rng).is_err());
        assert!(haar_projection::<f64, _>(4, 5, &mut rng).is_err());
    }

    #[test]
    fn projection_invariants() {
        let mut rng = RngStream::new(3).rng();
        let p: ProjectionOp<f64> = haar_projection(30, 11, &mut rng).unwrap();
        assert!(p.gram_error() < 1e-10);
        let xs = sample_sphere::<f64>(30, 200, RngStream::new(4)).unwrap();
        for pair in xs.chunks(2) {
            let (x, y) = (&pair[0], &pair[1]);
            let px = p.apply(x);
            let ppx = p.apply(&px);
            assert!(norm(&crate::linalg::sub(&ppx, &px)) <= 1e-10);
            assert!(norm(&px) <= 1.0 + 1e-12);
            assert!((dot(&px, y) - dot(x, &p.apply(y))).abs() <= 1e-10);
        }
    }

    #[test]
    fn complement_examples() {
        let id = ProjectionOp::<f64>::identity(5);
        assert_eq!(id.complement().rank(), 0);
        let mut rng = RngStream::new(5).rng();
        let p: ProjectionOp<f64> = haar_projection(9, 4, &mut rng).unwrap();
        let q = p.complement();
        assert_eq!(q.rank(), 5);
        assert!(q.gram_error() < 1e-10);
        let pp = q.complement();
        // same range: each basis vector of p is reproduced by pp
        for b in p.basis() {
            assert!((pp.image_norm(b) - 1.0).abs() < 1e-10);
        }
        for x in sample_sphere::<f64>(9, 50, RngStream::new(6)).unwrap() {
            let s = crate::linalg::add(&p.apply(&x), &q.apply(&x));
            assert!(norm(&crate::linalg::sub(&s, &x)) < 1e-10);
            let pyth = p.image_norm(&x).powi(2) + q.image_norm(&x).powi(2);
            assert!((pyth - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn from_basis_checks() {
        assert!(ProjectionOp::<f64>::from_basis(2, vec![vec![1.0, 0.0], vec![1.0, 1.0]]).is_err());
        assert!(ProjectionOp::<f64>::from_basis(2, vec![vec![1.0, 0.0, 0.0]]).is_err());
        let p = ProjectionOp::<f64>::from_basis(2, vec![vec![0.6, 0.8]]).unwrap();
        assert!((p.image_norm(&[0.6, 0.8]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jl_full_rank_never_fails() {
        let pts = sample_sphere::<f64>(8, 5, RngStream::new(7)).unwrap();
        let r = jl_concentration(&pts, 8, 0.01, 200, RngStream::new(8)).unwrap();
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn jl_errors() {
        let pts = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(jl_concentration(&pts, 1, 0.5, 10, RngStream::new(0)), Err(Error::ZeroPoint(1))));
        let pts = vec![vec![1.0, 0.0]];
        assert!(jl_concentration(&pts, 1, 0.0, 10, RngStream::new(0)).is_err());
        assert!(jl_concentration(&pts, 3, 0.5, 10, RngStream::new(0)).is_err());
        assert!(jl_concentration(&pts, 1, 0.5, 0, RngStream::new(0)).is_err());
    }

    #[test]
    fn jl_paths_agree_in_distribution() {
        // Rotating the span (few points) vs drawing the range (many points) must give
        // the same failure law; compare a 1-point run to a run where the point is
        // repeated enough times to force the direct path.
        let y = vec![vec![1.0; 20]];
        let many: Vec<Vec<f64>> = (0..8).map(|_| vec![1.0; 20]).collect();
        let trials = 20_000;
        let a = jl_concentration(&y, 5, 0.3, trials, RngStream::new(9)).unwrap();
        let b = jl_concentration(&many, 5, 0.3, trials, RngStream::new(10)).unwrap();
        let se = (a.binomial_sigma().powi(2) + b.binomial_sigma().powi(2)).sqrt();
        assert!((a.empirical_failure - b.empirical_failure).abs() < 3.0 * se);
    }

    #[test]
    fn jl_monotone_in_epsilon() {
        let pts = sample_sphere::<f64>(40, 10, RngStream::new(11)).unwrap();
        let mut prev = 1.0;
        for eps in [0.1, 0.2, 0.3, 0.5] {
            let r = jl_concentration(&pts, 10, eps, 2000, RngStream::new(12)).unwrap();
            assert!(r.empirical_failure <= prev);
            prev = r.empirical_failure;
        }
    }
}
