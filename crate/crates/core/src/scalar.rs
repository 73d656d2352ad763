//! Numeric traits the rest of the crate is generic over.
//!
//! Probability tables and information measures need logarithms, so they are
//! written against [`Real`] (`f32` or `f64`). Linear inequality systems,
//! Fourier-Motzkin elimination and the small LP solver only need ordered field
//! arithmetic and are written against [`Scalar`], which is additionally
//! implemented for [`BigRational`] so projections can be carried out exactly.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Signed, ToPrimitive, Zero};

/// Floating point scalar used for probabilities: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + Sum + Send + Sync + Debug + Display + Default + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real")
    }

    /// `x log2 x` with the convention `0 log 0 = 0`.
    fn xlog2x(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            self * self.log2()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field scalar for linear inequality systems.
pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Slack allowed when testing `x >= 0`. Exact types use zero.
    fn tolerance() -> Self;

    /// Whether the value should be treated as an exact zero pivot.
    fn is_negligible(&self) -> bool;

    fn from_real(x: f64) -> Self;

    fn to_real(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn geq_tol(&self, rhs: &Self, tol: &Self) -> bool {
        self.clone() - rhs.clone() >= -tol.clone()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-12
    }

    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-6
    }

    fn from_real(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    /// Exact conversion of the binary value of `x`.
    fn from_real(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
}
