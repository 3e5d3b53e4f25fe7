use super::tensor::{disk_tensor, local_block, PolTensor2D};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use nalgebra::Matrix3;

/// Vacuum permittivity in F/m.
pub const EPS0: f64 = 8.854e-12;
/// Vacuum permeability in H/m.
pub const MU0: f64 = 4.0 * std::f64::consts::PI * 1e-7;

/// Material and cross-section radius of the tube. The background constants
/// only enter through the wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T> {
    pub eps_r: T,
    pub mu_r: T,
    pub rho: T,
    pub eps0: T,
    pub mu0: T,
}

impl<T: Real> Material<T> {
    pub fn new(eps_r: T, mu_r: T, rho: T) -> Result<Self> {
        let m = Self { eps_r, mu_r, rho, eps0: lit(EPS0), mu0: lit(MU0) };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("eps_r", self.eps_r), ("mu_r", self.mu_r), ("rho", self.rho), ("eps0", self.eps0), ("mu0", self.mu0)]
        {
            if !(v > T::zero()) || !to_f64(v).is_finite() {
                return Err(Error::InvalidMaterial(format!("{name} must be positive, got {}", to_f64(v))));
            }
        }
        Ok(())
    }

    /// Wavenumber `k = 2 pi f sqrt(eps0 mu0)` at frequency `f` (Hz).
    pub fn wavenumber(&self, frequency: T) -> T {
        T::two_pi() * frequency * (self.eps0 * self.mu0).sqrt()
    }

    /// Disk cross-section tensors in relative units: `(m_eps, m_mu)`.
    pub fn disk_tensors(&self) -> Result<(PolTensor2D<T>, PolTensor2D<T>)> {
        Ok((disk_tensor(T::one(), self.eps_r)?, disk_tensor(T::one(), self.mu_r)?))
    }

    /// `diag(1, 2/(eps_r+1), 2/(eps_r+1))` and the same for `mu_r`.
    pub fn local_tensors(&self) -> Result<(Matrix3<T>, Matrix3<T>)> {
        let (e, m) = self.disk_tensors()?;
        Ok((local_block(&e.0), local_block(&m.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_at_100_mhz() {
        let m = Material::new(2.5f64, 1.6, 0.03).unwrap();
        let k = m.wavenumber(1e8);
        assert!((k - 2.0958).abs() < 1e-3, "{k}");
    }

    #[test]
    fn rejects_non_positive() {
        assert!(Material::new(0.0, 1.0, 0.1).is_err());
        assert!(Material::new(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn local_tensor_entries() {
        let (e, m) = Material::new(2.5f64, 1.0, 0.03).unwrap().local_tensors().unwrap();
        assert!((e[(1, 1)] - 2.0 / 3.5).abs() < 1e-15);
        assert_eq!(e[(0, 0)], 1.0);
        assert_eq!(m, Matrix3::identity());
    }
}
