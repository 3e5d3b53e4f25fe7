//! Local coordinates `r(s, eta, zeta) = p(s) + [n b] R_theta(s) (eta, zeta)^T`
//! around a center curve.

use nalgebra::{Matrix2, Vector2, Vector3};

use super::curve::ParametricCurve;
use super::frame::{curvature_of, pointwise_frame};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Twist angle `theta(s)` of the cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Twist<T> {
    Constant(T),
    /// `theta(s) = start + rate * s`.
    Linear {
        start: T,
        rate: T,
    },
}

impl<T: Real> Twist<T> {
    pub fn angle(&self, s: T) -> T {
        match *self {
            Twist::Constant(a) => a,
            Twist::Linear { start, rate } => start + rate * s,
        }
    }

    pub fn rate(&self) -> T {
        match *self {
            Twist::Constant(_) => T::zero(),
            Twist::Linear { rate, .. } => rate,
        }
    }
}

pub fn rotation2<T: Real>(theta: T) -> Matrix2<T> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

#[derive(Debug, Clone)]
pub struct TubeCoordinates<'a, T: Real, C: ?Sized> {
    curve: &'a C,
    twist: Twist<T>,
    radius: T,
}

/// Number of samples used to bound the curvature when validating the radius.
const CURVATURE_SAMPLES: usize = 512;

impl<'a, T: Real, C: ParametricCurve<T> + ?Sized> TubeCoordinates<'a, T, C> {
    /// Fails unless `radius * kappa_max < 1`, with `kappa_max` taken over a
    /// uniform sampling of the curve.
    pub fn new(curve: &'a C, twist: Twist<T>, radius: T) -> Result<Self> {
        let mut kappa_max = T::zero();
        for k in 0..=CURVATURE_SAMPLES {
            let s = lit::<T>(k as f64 / CURVATURE_SAMPLES as f64);
            let jet = curve.jet(s)?;
            if !super::frame::is_regular(&jet) {
                return Err(Error::ZeroSpeed(to_f64(s)));
            }
            kappa_max = kappa_max.max(curvature_of(&jet));
        }
        if !(radius > T::zero()) || radius * kappa_max >= T::one() {
            return Err(Error::RadiusTooLarge { radius: to_f64(radius), kappa_max: to_f64(kappa_max) });
        }
        Ok(Self { curve, twist, radius })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    fn check(&self, eta: T, zeta: T) -> Result<()> {
        if (eta * eta + zeta * zeta).sqrt() < self.radius {
            Ok(())
        } else {
            Err(Error::OutsideTube { eta: to_f64(eta), zeta: to_f64(zeta), radius: to_f64(self.radius) })
        }
    }

    pub fn point(&self, s: T, eta: T, zeta: T) -> Result<Vector3<T>> {
        self.check(eta, zeta)?;
        let jet = self.curve.jet(s)?;
        let f = pointwise_frame(&jet);
        let local = rotation2(self.twist.angle(s)) * Vector2::new(eta, zeta);
        Ok(jet.point + f.normal * local.x + f.binormal * local.y)
    }

    /// `J(s, eta, zeta) = 1 - kappa(s) e_1 . R_theta(s) (eta, zeta)^T`, the
    /// volume factor of the local coordinates relative to arc length.
    pub fn jacobian(&self, s: T, eta: T, zeta: T) -> Result<T> {
        self.check(eta, zeta)?;
        let jet = self.curve.jet(s)?;
        let kappa = if super::frame::bends(&jet) { curvature_of(&jet) } else { T::zero() };
        let (sn, cs) = self.twist.angle(s).sin_cos();
        Ok(T::one() - kappa * (cs * eta - sn * zeta))
    }
}
