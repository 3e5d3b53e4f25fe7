use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::{lit, CVec3, Real};

/// Equiangular direction grid on the unit sphere with trapezoid weights.
///
/// Directions are `(sin a_j cos b_l, sin a_j sin b_l, cos a_j)` with
/// `a_j = j pi / N`, `j = 1..N-1`, and `b_l = (l - 1) pi / N`, `l = 1..2N`,
/// stored with `l` running fastest. Weights are `(pi / N)^2 sin a_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldGrid<T: Real> {
    n: usize,
    directions: Vec<Vector3<T>>,
    weights: Vec<T>,
    samples: Option<Vec<CVec3<T>>>,
}

impl<T: Real> FarFieldGrid<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("N = {n}, need at least 2")));
        }
        let pi = T::pi();
        let step = pi / lit::<T>(n as f64);
        let mut directions = Vec::with_capacity(2 * n * (n - 1));
        let mut weights = Vec::with_capacity(2 * n * (n - 1));
        for j in 1..n {
            let a = step * lit::<T>(j as f64);
            let (sa, ca) = a.sin_cos();
            for l in 1..=2 * n {
                let b = step * lit::<T>((l - 1) as f64);
                let (sb, cb) = b.sin_cos();
                directions.push(Vector3::new(sa * cb, sa * sb, ca));
                weights.push(step * step * sa);
            }
        }
        Ok(Self { n, directions, weights, samples: None })
    }

    /// The grid parameter `N`.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of directions, `2 N (N - 1)`.
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vector3<T>] {
        &self.directions
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Flat index of the 1-based pair `(j, l)`.
    pub fn index(&self, j: usize, l: usize) -> usize {
        (j - 1) * 2 * self.n + (l - 1)
    }

    /// 1-based `(j, l)` of a flat index.
    pub fn angles(&self, index: usize) -> (usize, usize) {
        (index / (2 * self.n) + 1, index % (2 * self.n) + 1)
    }

    pub fn weight_sum(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, w| a + *w)
    }

    pub fn samples(&self) -> Result<&[CVec3<T>]> {
        self.samples.as_deref().ok_or(Error::MissingSamples)
    }

    pub fn has_samples(&self) -> bool {
        self.samples.is_some()
    }

    pub fn with_samples(mut self, samples: Vec<CVec3<T>>) -> Result<Self> {
        self.set_samples(samples)?;
        Ok(self)
    }

    pub fn set_samples(&mut self, samples: Vec<CVec3<T>>) -> Result<()> {
        if samples.len() != self.len() {
            return Err(Error::PointCountMismatch { expected: self.len(), got: samples.len() });
        }
        self.samples = Some(samples);
        Ok(())
    }

    pub fn take_samples(&mut self) -> Option<Vec<CVec3<T>>> {
        self.samples.take()
    }
}

/// Discrete `L^2(S^2)` norm `sqrt(sum_jl w_jl |E_jl|^2)`.
pub fn sphere_norm<T: Real>(grid: &FarFieldGrid<T>) -> Result<T> {
    Ok(weighted_norm(grid.weights(), grid.samples()?))
}

pub(crate) fn weighted_norm<T: Real>(weights: &[T], samples: &[CVec3<T>]) -> T {
    weights
        .iter()
        .zip(samples)
        .fold(T::zero(), |acc, (w, e)| acc + *w * (e[0].norm_sqr() + e[1].norm_sqr() + e[2].norm_sqr()))
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn directions_are_unit_and_counted() {
        let g = FarFieldGrid::<f64>::new(10).unwrap();
        assert_eq!(g.len(), 180);
        for d in g.directions() {
            assert!((d.norm() - 1.0).abs() < 1e-15);
        }
        assert!(g.weights().iter().all(|w| *w > 0.0));
        assert_eq!(g.angles(g.index(3, 7)), (3, 7));
    }

    #[test]
    fn weight_sum_close_to_sphere_area() {
        let area = 4.0 * std::f64::consts::PI;
        let s = FarFieldGrid::<f64>::new(10).unwrap().weight_sum();
        assert!((s - area).abs() / area < 0.05, "{s}");
    }

    #[test]
    fn norm_of_constant_samples() {
        let g = FarFieldGrid::<f64>::new(10).unwrap();
        let one = CVec3::new(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        let g = g.clone().with_samples(vec![one; g.len()]).unwrap();
        let nrm = sphere_norm(&g).unwrap();
        assert!((nrm * nrm - g.weight_sum()).abs() < 1e-12);
        assert!(matches!(sphere_norm(&FarFieldGrid::<f64>::new(3).unwrap()), Err(Error::MissingSamples)));
    }

    #[test]
    fn too_small_grid() {
        assert!(FarFieldGrid::<f64>::new(1).is_err());
    }
}
