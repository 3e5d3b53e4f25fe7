use nalgebra::Vector3;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, lit, real_cross, real_dot, to_f64, CVec3, Real};

/// Incident plane wave `A exp(i k theta . x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave<T: Real> {
    pub k: T,
    pub theta: Vector3<T>,
    pub polarization: CVec3<T>,
}

impl<T: Real> PlaneWave<T> {
    pub fn new(k: T, theta: Vector3<T>, polarization: CVec3<T>) -> Result<Self> {
        let w = Self { k, theta, polarization };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > T::zero()) || !to_f64(self.k).is_finite() {
            return Err(Error::InvalidWave(format!("wavenumber {} must be positive", to_f64(self.k))));
        }
        // 1e-12 in double precision, a few ulps in single
        let tol = lit::<T>(1e-12).max(T::default_epsilon() * lit::<T>(16.0));
        if (self.theta.norm() - T::one()).abs() > tol {
            return Err(Error::InvalidWave(format!("|theta| = {}", to_f64(self.theta.norm()))));
        }
        let size = crate::scalar::cnorm(&self.polarization);
        if !(size > T::zero()) {
            return Err(Error::InvalidWave("zero polarization".into()));
        }
        let d = real_dot(&self.theta, &self.polarization);
        if d.re.abs() > tol * size || d.im.abs() > tol * size {
            return Err(Error::InvalidWave("polarization not perpendicular to theta".into()));
        }
        Ok(())
    }

    /// `E^i(x)`.
    pub fn field(&self, x: &Vector3<T>) -> CVec3<T> {
        let phase = cis(self.k * self.theta.dot(x));
        self.polarization.map(|a| a * phase)
    }

    /// `curl E^i(x) = i k theta x A exp(i k theta . x)`.
    pub fn curl(&self, x: &Vector3<T>) -> CVec3<T> {
        let phase = cis(self.k * self.theta.dot(x)) * Complex::new(T::zero(), self.k);
        self.theta_cross_a().map(|a| a * phase)
    }

    pub fn theta_cross_a(&self) -> CVec3<T> {
        real_cross(&self.theta, &self.polarization)
    }

    /// Same wave with every vector rotated by `q`.
    pub fn rotated(&self, q: &nalgebra::Matrix3<T>) -> Self {
        Self { k: self.k, theta: q * self.theta, polarization: crate::scalar::real_mat_mul(q, &self.polarization) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave() -> PlaneWave<f64> {
        let theta = Vector3::new(1.0, -1.0, 1.0) / 3f64.sqrt();
        let a = CVec3::new(Complex::new(-1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(1.0, 1.0));
        PlaneWave::new(2.1, theta, a).unwrap()
    }

    #[test]
    fn accepts_transverse_polarization() {
        let w = wave();
        let (re, im) = (w.polarization.map(|c| c.re), w.polarization.map(|c| c.im));
        assert!(re.dot(&w.theta).abs() < 1e-15 && im.dot(&w.theta).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let a = CVec3::new(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        assert!(PlaneWave::new(1.0, Vector3::x(), a).is_err());
        assert!(PlaneWave::new(1.0, Vector3::new(0.0, 0.0, 2.0), a).is_err());
        assert!(PlaneWave::new(0.0, Vector3::z(), a).is_err());
        assert!(PlaneWave::new(1.0, Vector3::z(), CVec3::zeros()).is_err());
    }

    #[test]
    fn curl_matches_finite_differences() {
        let w = wave();
        let x = Vector3::new(0.3, -0.2, 0.9);
        let h = 1e-6;
        let d = |i: usize| {
            let mut e = Vector3::zeros();
            e[i] = h;
            (w.field(&(x + e)) - w.field(&(x - e))) / Complex::new(2.0 * h, 0.0)
        };
        let (dx, dy, dz) = (d(0), d(1), d(2));
        let curl = CVec3::new(dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]);
        assert!(crate::scalar::cnorm(&(curl - w.curl(&x))) < 1e-8);
    }
}
