//! Shape derivative of the far-field operator.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::Result;
use crate::forward::{CurveSamples, FarFieldKernel, PlaneWave, QuadratureRule};
use crate::geometry::ParametricCurve;
use crate::polarization::{tensor_shape_derivative, Material};
use crate::scalar::{real_mat_mul, CVec3, Real};

/// Far-field integrand and its linearization at each quadrature node.
pub(crate) struct ShapeKernel<T: Real> {
    pub base: FarFieldKernel<T>,
    weights: Vec<T>,
    speed: Vec<T>,
    tangents: Vec<Vector3<T>>,
    /// `M_mu'(e_d) (theta x A)` for a unit change `h' = e_d`.
    d_mu: Vec<[CVec3<T>; 3]>,
    /// `M_eps'(e_d) A`.
    d_eps: Vec<[CVec3<T>; 3]>,
}

impl<T: Real> ShapeKernel<T> {
    pub fn new(
        samples: &CurveSamples<T>,
        material: &Material<T>,
        wave: &PlaneWave<T>,
        quad: &QuadratureRule<T>,
    ) -> Result<Self> {
        let base = FarFieldKernel::new(samples, material, wave);
        let ta = wave.theta_cross_a();
        let mut d_mu = Vec::with_capacity(samples.len());
        let mut d_eps = Vec::with_capacity(samples.len());
        for (frame, &speed) in samples.frames.frames.iter().zip(&samples.frames.speed) {
            let mut mu = [CVec3::zeros(); 3];
            let mut eps = [CVec3::zeros(); 3];
            for d in 0..3 {
                let e = Vector3::ith(d, T::one());
                let dm = tensor_shape_derivative(frame, speed, &samples.local_mu, &e)?;
                let de = tensor_shape_derivative(frame, speed, &samples.local_eps, &e)?;
                mu[d] = real_mat_mul(&dm, &ta);
                eps[d] = real_mat_mul(&de, &wave.polarization);
            }
            d_mu.push(mu);
            d_eps.push(eps);
        }
        Ok(Self {
            base,
            weights: quad.weights().to_vec(),
            speed: samples.frames.speed.clone(),
            tangents: samples.frames.frames.iter().map(|f| f.tangent).collect(),
            d_mu,
            d_eps,
        })
    }

    /// Derivatives of the weighted integrand at node `q` with respect to the
    /// curve point (`pos`) and the curve velocity (`vel`); column `d` belongs
    /// to coordinate `d`.
    pub fn node_derivatives(&self, xhat: &Vector3<T>, q: usize) -> (Matrix3<Complex<T>>, Matrix3<Complex<T>>) {
        let b = &self.base;
        let phase = b.phase(xhat, q);
        let g = b.project(xhat, &b.mu_terms[q], &b.eps_terms[q]).map(|c| c * phase);
        let ws = self.weights[q] * self.speed[q];
        let ik = Complex::new(T::zero(), b.k);
        let shift = b.theta - xhat;
        let mut pos = Matrix3::zeros();
        let mut vel = Matrix3::zeros();
        for d in 0..3 {
            let c = ik.scale(shift[d] * ws);
            pos.set_column(d, &g.map(|v| v * c));
            let dm = b.project(xhat, &self.d_mu[q][d], &self.d_eps[q][d]).map(|c| c * phase);
            let col = dm.map(|v| v.scale(ws)) + g.map(|v| v.scale(self.weights[q] * self.tangents[q][d]));
            vel.set_column(d, &col);
        }
        (pos, vel)
    }
}

/// Directional derivative of the far field at `curve` in the direction of the
/// displacement field `h`, evaluated at `directions`.
pub fn frechet_t<T, C, H>(
    curve: &C,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    directions: &[Vector3<T>],
    quad: &QuadratureRule<T>,
    h: &H,
) -> Result<Vec<CVec3<T>>>
where
    T: Real,
    C: ParametricCurve<T> + ?Sized,
    H: ParametricCurve<T> + ?Sized,
{
    wave.validate()?;
    let samples = CurveSamples::new(curve, material, quad)?;
    let kernel = ShapeKernel::new(&samples, material, wave, quad)?;
    let hj = quad.nodes().iter().map(|&s| h.jet(s)).collect::<Result<Vec<_>>>()?;
    Ok(directions
        .par_iter()
        .map(|x| {
            let mut acc = CVec3::zeros();
            for (q, j) in hj.iter().enumerate() {
                let (pos, vel) = kernel.node_derivatives(x, q);
                acc +=
                    pos * j.point.map(|v| Complex::new(v, T::zero())) + vel * j.d1.map(|v| Complex::new(v, T::zero()));
            }
            acc
        })
        .collect())
}
