//! Scalar abstraction shared by every numerical module.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable as the base field of the laboratory (`f32`, `f64`).
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive {}

/// Complex amplitude over a real scalar.
pub type Cx<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn real<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance `base` for `f64`, widened to a few hundred ulps for coarser scalars.
#[inline]
pub fn tol<T: Real>(base: f64) -> T {
    let floor = T::default_epsilon() * lit::<T>(256.0);
    lit::<T>(base).max(floor)
}

/// `|z|` without requiring `num_traits::Float`.
#[inline]
pub fn modulus<T: Real>(z: Cx<T>) -> T {
    z.norm_sqr().sqrt()
}
