//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt;

use nalgebra as na;
use num_traits as nt;

pub use na::Complex;

/// Real floating point scalar (`f32` or `f64`) usable throughout the solver.
pub trait Real:
    na::RealField + Copy + nt::FromPrimitive + nt::ToPrimitive + fmt::Debug + fmt::Display
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as nt::FromPrimitive>::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the scalar type.
    #[inline]
    fn machine_eps() -> Self {
        Self::default_epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub(crate) fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.re.exp();
    Complex::new(r * z.im.cos(), r * z.im.sin())
}

/// Complex square root on the principal branch.
pub(crate) fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let m = cabs(z);
    if m == T::zero() {
        return creal(T::zero());
    }
    let half = T::lit(0.5);
    let re = ((m + z.re) * half).max(T::zero()).sqrt();
    let im = ((m - z.re) * half).max(T::zero()).sqrt();
    Complex::new(re, if z.im < T::zero() { -im } else { im })
}
