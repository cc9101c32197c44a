//! Scalar abstraction shared by every numerical module.
//!
//! All simulator math is written against [`Real`], implemented for `f32`
//! and `f64`. Amplitudes are `Complex<T>`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Complex amplitude over the scalar `T`.
pub type Cplx<T> = Complex<T>;

/// Real floating-point scalar used throughout the crate.
pub trait Real:
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
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance of `x`, widened to what the precision of `Self` can resolve.
    fn tolerance(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(1.0e3);
        Self::lit(x).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn cr<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

/// `e^{i phi}`.
pub(crate) fn phase<T: Real>(phi: T) -> Cplx<T> {
    Complex::new(phi.cos(), phi.sin())
}

/// `ln(n!)`, exact summation for the small arguments used here.
pub(crate) fn ln_factorial<T: Real>(n: usize) -> T {
    (2..=n).map(|k| T::from_usize_lossy(k).ln()).sum()
}
