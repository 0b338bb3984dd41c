use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Declared convexity of a body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexityClass<T> {
    Star,
    /// `K + K ⊂ c K`.
    QuasiConvex(T),
    /// Closed under `λx + μy` with `λ^p + μ^p = 1`. `PConvex(1)` is convex.
    PConvex(T),
}

impl<T: Scalar> ConvexityClass<T> {
    /// Constant `a` with `K + K ⊂ aK` (equivalently `K − K ⊂ aK` for symmetric bodies).
    pub fn sum_constant(&self) -> Option<T> {
        match *self {
            ConvexityClass::Star => None,
            ConvexityClass::QuasiConvex(c) => Some(c),
            ConvexityClass::PConvex(p) => Some(T::lit(2.0).powf(T::one() / p)),
        }
    }

    pub fn p(&self) -> Option<T> {
        match *self {
            ConvexityClass::PConvex(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(*self, ConvexityClass::PConvex(p) if p >= T::one())
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ConvexityClass::Star => Ok(()),
            ConvexityClass::QuasiConvex(c) if c >= T::one() && c.is_finite() => Ok(()),
            ConvexityClass::PConvex(p) if p > T::zero() && p <= T::one() => Ok(()),
            other => Err(invalid(format!("bad convexity class {other:?}"))),
        }
    }
}

pub type GaugeFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

#[derive(Clone)]
pub(crate) enum EllipsoidFactor<T> {
    /// `M = diag(d)`; stores `sqrt(d)`.
    Diagonal(Vec<T>),
    /// `M = L Lᵀ`.
    Dense { shape: Matrix<T>, chol: Matrix<T> },
}

#[derive(Clone)]
pub(crate) enum Shape<T> {
    Lp { p: T },
    Ellipsoid(EllipsoidFactor<T>),
    Scaled { inner: Box<Body<T>>, factor: T },
    LinearImage { inner: Box<Body<T>>, map: Matrix<T>, inverse: Matrix<T> },
    Oracle { gauge: GaugeFn<T>, radius: Option<T> },
}

/// A centrally symmetric star body in `R^n`, given by its gauge.
#[derive(Clone)]
pub struct Body<T> {
    dim: usize,
    shape: Shape<T>,
    class: ConvexityClass<T>,
    label: String,
}

impl<T: Scalar> fmt::Debug for Body<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Body")
            .field("dim", &self.dim)
            .field("class", &self.class)
            .field("label", &self.label)
            .finish()
    }
}

/// Number of random directions probed for gauge positivity at construction, on top of the coordinate axes.
pub const POSITIVITY_PROBES: usize = 1000;
/// A probe direction with gauge below this rejects the body as unbounded.
pub const POSITIVITY_FLOOR: f64 = 1e-9;

#[inline]
fn lp_gauge<T: Scalar>(p: T, x: &[T]) -> T {
    if p == T::one() {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == T::lit(2.0) {
        return norm(x);
    }
    let m = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if m == T::zero() {
        return T::zero();
    }
    if p == T::lit(0.5) {
        let s: T = x.iter().map(|v| (v.abs() / m).sqrt()).sum();
        return m * s * s;
    }
    let s: T = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * s.powf(T::one() / p)
}

fn max_abs<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

impl<T: Scalar> Body<T> {
    fn build(dim: usize, shape: Shape<T>, class: ConvexityClass<T>, label: String) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        class.validate()?;
        let body = Self { dim, shape, class, label };
        body.probe_positivity()?;
        Ok(body)
    }

    fn probe_positivity(&self) -> Result<()> {
        let mut rng = RngStream::with_stream(0x51DE, 0xB0D1).rng();
        let mut x = vec![T::zero(); self.dim];
        for i in 0..self.dim {
            x[i] = T::one();
            let g = self.gauge_unchecked(&x);
            if !(g >= T::lit(POSITIVITY_FLOOR)) {
                return Err(Error::Unbounded { value: g.as_f64() });
            }
            x[i] = T::zero();
        }
        for _ in 0..POSITIVITY_PROBES {
            for v in x.iter_mut() {
                *v = T::standard_normal(&mut rng);
            }
            let r = norm(&x);
            if r == T::zero() {
                continue;
            }
            let g = self.gauge_unchecked(&x) / r;
            if !(g >= T::lit(POSITIVITY_FLOOR)) {
                return Err(Error::Unbounded { value: g.as_f64() });
            }
        }
        Ok(())
    }

    /// Unit ball of `ℓ_p^n`, `p > 0`. p-convex for `p ≤ 1`, convex otherwise.
    pub fn lp_ball(p: T, n: usize) -> Result<Self> {
        if !(p > T::zero() && p.is_finite()) {
            return Err(invalid(format!("lp exponent must be positive and finite, got {p}")));
        }
        let class = ConvexityClass::PConvex(p.min(T::one()));
        Self::build(n, Shape::Lp { p }, class, format!("lp(p={p},n={n})"))
    }

    /// The euclidean unit ball `D`.
    pub fn euclidean_ball(n: usize) -> Result<Self> {
        let ones = vec![T::one(); n];
        Self::ellipsoid_diag(&ones)
    }

    /// `{x : Σ d_i x_i² ≤ 1}`.
    pub fn ellipsoid_diag(d: &[T]) -> Result<Self> {
        if d.is_empty() || d.iter().any(|&v| !(v > T::zero() && v.is_finite())) {
            return Err(invalid("ellipsoid diagonal must be positive and finite"));
        }
        let label = format!(
            "ellipsoid(diag={})",
            d.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        let sqrt_d = d.iter().map(|v| v.sqrt()).collect();
        Self::build(
            d.len(),
            Shape::Ellipsoid(EllipsoidFactor::Diagonal(sqrt_d)),
            ConvexityClass::PConvex(T::one()),
            label,
        )
    }

    /// `{x : xᵀ M x ≤ 1}` for symmetric positive definite `M`.
    pub fn ellipsoid(shape: Matrix<T>) -> Result<Self> {
        let n = shape.rows();
        let scale = shape.as_slice().iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if !shape.is_symmetric(T::tol(1e-12) * scale.max(T::one())) {
            return Err(invalid("ellipsoid matrix must be symmetric"));
        }
        let chol = shape
            .cholesky()
            .ok_or_else(|| invalid("ellipsoid matrix must be positive definite"))?;
        Self::build(
            n,
            Shape::Ellipsoid(EllipsoidFactor::Dense { shape, chol }),
            ConvexityClass::PConvex(T::one()),
            format!("ellipsoid(dense,n={n})"),
        )
    }

    /// `tK`, with gauge `‖x‖_K / t`.
    pub fn scaled(&self, t: T) -> Result<Self> {
        if !(t > T::zero() && t.is_finite()) {
            return Err(invalid(format!("scale factor must be positive, got {t}")));
        }
        let label = format!("scale({},{t})", self.label);
        Self::build(
            self.dim,
            Shape::Scaled { inner: Box::new(self.clone()), factor: t },
            self.class,
            label,
        )
    }

    /// `AK` for invertible `A`, with gauge `‖A⁻¹x‖_K`.
    pub fn linear_image(&self, map: Matrix<T>) -> Result<Self> {
        if map.rows() != self.dim || map.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: map.rows() });
        }
        let inverse = map.inverse().ok_or_else(|| invalid("linear map must be invertible"))?;
        let label = format!("linimg({})", self.label);
        Self::build(
            self.dim,
            Shape::LinearImage { inner: Box::new(self.clone()), map, inverse },
            self.class,
            label,
        )
    }

    /// A body from an arbitrary gauge oracle. `radius`, if given, bounds `|x|` on the
    /// body and enables rejection sampling in low dimension.
    pub fn from_gauge<F>(
        dim: usize,
        class: ConvexityClass<T>,
        label: impl Into<String>,
        radius: Option<T>,
        gauge: F,
    ) -> Result<Self>
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        Self::build(dim, Shape::Oracle { gauge: Arc::new(gauge), radius }, class, label.into())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> ConvexityClass<T> {
        self.class
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    pub fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// `‖x‖_K`.
    pub fn gauge(&self, x: &[T]) -> Result<T> {
        self.check_point(x)?;
        Ok(self.gauge_unchecked(x))
    }

    /// `‖x‖_K` without the dimension and finiteness checks.
    #[inline]
    pub fn gauge_unchecked(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        match &self.shape {
            Shape::Lp { p } => lp_gauge(*p, x),
            Shape::Ellipsoid(EllipsoidFactor::Diagonal(s)) => {
                let mut acc = T::zero();
                for (&si, &xi) in s.iter().zip(x) {
                    let w = si * xi;
                    acc += w * w;
                }
                acc.sqrt()
            }
            Shape::Ellipsoid(EllipsoidFactor::Dense { chol, .. }) => norm(&chol.lower_transpose_mul(x)),
            Shape::Scaled { inner, factor } => inner.gauge_unchecked(x) / *factor,
            Shape::LinearImage { inner, inverse, .. } => inner.gauge_unchecked(&inverse.matvec(x)),
            Shape::Oracle { gauge, .. } => {
                if x.iter().all(|v| *v == T::zero()) {
                    T::zero()
                } else {
                    gauge(x)
                }
            }
        }
    }

    /// Exact support function where a closed form exists (of the convex hull for
    /// `ℓ_p`, `p < 1`), `None` otherwise.
    pub(crate) fn support_closed_form(&self, u: &[T]) -> Option<T> {
        match &self.shape {
            Shape::Lp { p } => {
                let p = *p;
                if p <= T::one() {
                    Some(max_abs(u))
                } else if p == T::lit(2.0) {
                    Some(norm(u))
                } else {
                    Some(lp_gauge(p / (p - T::one()), u))
                }
            }
            Shape::Ellipsoid(EllipsoidFactor::Diagonal(s)) => {
                let mut acc = T::zero();
                for (&si, &ui) in s.iter().zip(u) {
                    let w = ui / si;
                    acc += w * w;
                }
                Some(acc.sqrt())
            }
            Shape::Ellipsoid(EllipsoidFactor::Dense { chol, .. }) => Some(norm(&chol.solve_lower(u))),
            Shape::Scaled { inner, factor } => inner.support_closed_form(u).map(|h| h * *factor),
            Shape::LinearImage { inner, map, .. } => inner.support_closed_form(&map.tmatvec(u)),
            Shape::Oracle { .. } => None,
        }
    }

    /// `h_K(u) = sup_{x ∈ K} ⟨u, x⟩`, which is the gauge of the polar body.
    ///
    /// Closed form for ℓ_p balls and ellipsoids (and their scalings and linear
    /// images). Other bodies fall back to the max over a uniform cloud of
    /// `cloud_size` points, a lower estimate. For non-convex bodies the value
    /// is the support function of the convex hull.
    pub fn support_function(&self, u: &[T], cloud_size: usize, stream: RngStream) -> Result<T> {
        self.check_point(u)?;
        if u.iter().all(|v| *v == T::zero()) {
            return Err(Error::ZeroDirection);
        }
        if let Some(h) = self.support_closed_form(u) {
            return Ok(h);
        }
        let cloud = crate::functionals::sample_body_uniform(self, cloud_size.max(1), stream)?;
        Ok(cloud.iter().map(|x| dot(u, x)).fold(T::neg_infinity(), T::max))
    }

    /// Natural log of the volume, where a closed form exists.
    pub fn ln_volume(&self) -> Result<T> {
        let n = T::of_usize(self.dim);
        match &self.shape {
            Shape::Lp { p } => {
                let one = T::one();
                Ok(n * (T::lit(2.0).ln() + (one + one / *p).log_gamma()) - (one + n / *p).log_gamma())
            }
            Shape::Ellipsoid(f) => {
                let ball = n / T::lit(2.0) * T::PI().ln() - (T::one() + n / T::lit(2.0)).log_gamma();
                let ln_det_sqrt: T = match f {
                    EllipsoidFactor::Diagonal(s) => s.iter().map(|v| v.ln()).sum(),
                    EllipsoidFactor::Dense { chol, .. } => (0..self.dim).map(|i| chol.get(i, i).ln()).sum(),
                };
                Ok(ball - ln_det_sqrt)
            }
            Shape::Scaled { inner, factor } => Ok(inner.ln_volume()? + n * factor.ln()),
            Shape::LinearImage { inner, map, .. } => Ok(inner.ln_volume()? + map.determinant().abs().ln()),
            Shape::Oracle { .. } => Err(Error::NoClosedFormVolume(self.label.clone())),
        }
    }

    pub fn volume(&self) -> Result<T> {
        self.ln_volume().map(T::exp)
    }

    /// Whether the gauge is exactly the euclidean norm.
    pub fn is_euclidean_ball(&self) -> bool {
        match &self.shape {
            Shape::Lp { p } => *p == T::lit(2.0),
            Shape::Ellipsoid(EllipsoidFactor::Diagonal(s)) => s.iter().all(|v| *v == T::one()),
            _ => false,
        }
    }

    /// Upper bound on `|x|` over the body, when one is known.
    pub fn euclidean_radius(&self) -> Option<T> {
        match &self.shape {
            Shape::Lp { p } => {
                let half = T::lit(0.5);
                if *p <= T::lit(2.0) {
                    Some(T::one())
                } else {
                    Some(T::of_usize(self.dim).powf(half - T::one() / *p))
                }
            }
            Shape::Ellipsoid(EllipsoidFactor::Diagonal(s)) => {
                Some(T::one() / s.iter().fold(T::infinity(), |m, v| m.min(*v)))
            }
            Shape::Ellipsoid(EllipsoidFactor::Dense { shape, .. }) => {
                let m = nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| shape.get(i, j).as_f64());
                let min_eig = m.symmetric_eigenvalues().min();
                Some(T::lit(1.0 / min_eig.sqrt()))
            }
            Shape::Scaled { inner, factor } => inner.euclidean_radius().map(|r| r * *factor),
            Shape::LinearImage { inner, map, .. } => {
                let fro = map.as_slice().iter().map(|v| *v * *v).sum::<T>().sqrt();
                inner.euclidean_radius().map(|r| r * fro)
            }
            Shape::Oracle { radius, .. } => *radius,
        }
    }

    /// `M̃_K = E|x|` over uniform `x ∈ K`, when it has a closed form
    /// (euclidean balls and their dilates: `t·n/(n+1)`).
    pub fn mean_norm_closed_form(&self) -> Option<T> {
        let n = T::of_usize(self.dim);
        match &self.shape {
            Shape::Lp { p } if *p == T::lit(2.0) => Some(n / (n + T::one())),
            Shape::Ellipsoid(EllipsoidFactor::Diagonal(s)) if s.iter().all(|v| *v == s[0]) => {
                Some(n / (n + T::one()) / s[0])
            }
            Shape::Scaled { inner, factor } => inner.mean_norm_closed_form().map(|m| m * *factor),
            _ => None,
        }
    }
}
