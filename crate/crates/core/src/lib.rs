//! Thin tubular scatterers: leading-order far-field model with explicit
//! polarization tensors, and a regularized Gauss-Newton reconstruction of
//! the center curve from one electric far-field pattern.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod forward;
pub mod geometry;
pub mod inverse;
pub mod io;
pub mod polarization;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Partition64 = geometry::Partition<f64>;
pub type CurveSpline64 = geometry::CurveSpline<f64>;
pub type Frame64 = geometry::Frame<f64>;
pub type Material64 = polarization::Material<f64>;
pub type PolTensor2D64 = polarization::PolTensor2D<f64>;
pub type PolTensor3DField64 = polarization::PolTensor3DField<f64>;
pub type PlaneWave64 = forward::PlaneWave<f64>;
pub type FarFieldGrid64 = forward::FarFieldGrid<f64>;
pub type QuadratureRule64 = forward::QuadratureRule<f64>;
pub type Problem64 = inverse::Problem<f64>;
pub type Reconstruction64 = inverse::Reconstruction<f64>;
