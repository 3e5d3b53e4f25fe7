//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::LowerExp;

use nalgebra::{Matrix3, RealField, Vector3};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + LowerExp {}

impl Real for f32 {}
impl Real for f64 {}

/// Complex 3-vector used for field samples.
pub type CVec3<T> = Vector3<Complex<T>>;

/// Lossy conversion of an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar convertible to f64")
}

/// `exp(i phase)`.
#[inline]
pub fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

#[inline]
pub fn complexify<T: Real>(v: &Vector3<T>) -> CVec3<T> {
    v.map(|x| Complex::new(x, T::zero()))
}

/// Real 3x3 matrix applied to a complex vector.
#[inline]
pub fn real_mat_mul<T: Real>(m: &Matrix3<T>, v: &CVec3<T>) -> CVec3<T> {
    CVec3::from_fn(|i, _| v[0].scale(m[(i, 0)]) + v[1].scale(m[(i, 1)]) + v[2].scale(m[(i, 2)]))
}

/// `a x v` for real `a` and complex `v`.
#[inline]
pub fn real_cross<T: Real>(a: &Vector3<T>, v: &CVec3<T>) -> CVec3<T> {
    CVec3::new(
        v[2].scale(a[1]) - v[1].scale(a[2]),
        v[0].scale(a[2]) - v[2].scale(a[0]),
        v[1].scale(a[0]) - v[0].scale(a[1]),
    )
}

/// `a . v` for real `a` and complex `v`.
#[inline]
pub fn real_dot<T: Real>(a: &Vector3<T>, v: &CVec3<T>) -> Complex<T> {
    v[0].scale(a[0]) + v[1].scale(a[1]) + v[2].scale(a[2])
}

/// Euclidean norm of a complex 3-vector.
#[inline]
pub fn cnorm<T: Real>(v: &CVec3<T>) -> T {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_matches_complex_cross() {
        let a = Vector3::new(0.3, -1.2, 2.0);
        let v = CVec3::new(Complex::new(1.0, 2.0), Complex::new(-0.5, 0.1), Complex::new(0.0, -3.0));
        let expected = complexify(&a).cross(&v);
        assert!((real_cross(&a, &v) - expected).norm() < 1e-15);
    }

    #[test]
    fn cis_unit_modulus() {
        let z: Complex<f32> = cis(1.3f32);
        assert!((z.norm() - 1.0).abs() < 1e-6);
    }
}
