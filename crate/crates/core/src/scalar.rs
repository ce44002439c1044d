//! Scalar abstraction shared by every module.
//!
//! All linear algebra runs over `Complex<T>` where `T` is a real floating
//! point type. `f64` is the working precision of the verification suites;
//! `f32` is supported with looser default tolerances.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real scalar type underlying the complex matrices.
pub trait Real: RealField + Copy + ToPrimitive + Send + Sync {
    /// Default relative singular-value threshold.
    const DEFAULT_RANK_REL: f64;
    /// Default absolute threshold on projector-norm distances.
    const DEFAULT_GAP_ABS: f64;

    /// Converts an `f64` literal, rounding as needed.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_RANK_REL: f64 = 1e-10;
    const DEFAULT_GAP_ABS: f64 = 1e-8;
}

impl Real for f32 {
    const DEFAULT_RANK_REL: f64 = 1e-5;
    const DEFAULT_GAP_ABS: f64 = 1e-3;
}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::zero())
}

#[inline]
pub(crate) fn ci<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `e^{iθ}`.
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

pub(crate) fn modulus<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

pub(crate) fn argument<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

pub(crate) fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
