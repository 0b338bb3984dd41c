//! Scalar abstraction shared by the geometric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal, StandardUniform};

/// Floating point type the bodies, samplers and estimators are generic over.
///
/// Random draws and special functions live here so generic code does not need
/// `Distribution` bounds spelled out at every call site.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    type GammaDist: Distribution<Self> + Clone + Send + Sync;

    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    fn of_usize(n: usize) -> Self {
        Self::lit(n as f64)
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform on `[0, 1)`.
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma(shape, 1) distribution.
    fn gamma(shape: Self) -> Self::GammaDist;

    fn log_gamma(self) -> Self {
        Self::lit(statrs::function::gamma::ln_gamma(self.as_f64()))
    }

    /// `base` floored at a few hundred ulps, so f32 checks stay meaningful.
    fn tol(base: f64) -> Self {
        Self::lit(base).max(Self::epsilon() * Self::lit(256.0))
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type GammaDist = Gamma<$t>;

            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Exp1.sample(rng)
            }

            #[inline]
            fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardUniform.sample(rng)
            }

            fn gamma(shape: Self) -> Self::GammaDist {
                Gamma::new(shape, 1.0).expect("positive gamma shape")
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
