use nalgebra::{Matrix3, Vector3};
use num_complex::Complex;
use rayon::prelude::*;

use super::grid::FarFieldGrid;
use super::quadrature::QuadratureRule;
use super::wave::PlaneWave;
use crate::error::{Error, Result};
use crate::geometry::{frame_field_from_jets, CurveJet, OrthonormalFrameField, ParametricCurve};
use crate::polarization::{lift_tensor, local_block, Material};
use crate::scalar::{cis, lit, real_cross, real_dot, real_mat_mul, CVec3, Real};

/// Minimal distance between an observation point and the center curve.
pub const MIN_OBSERVATION_DISTANCE: f64 = 1e-3;

/// Curve, frames and lifted polarization tensors at the quadrature nodes.
#[derive(Debug, Clone)]
pub struct CurveSamples<T: Real> {
    pub jets: Vec<CurveJet<T>>,
    pub frames: OrthonormalFrameField<T>,
    /// `diag(1, m_eps)` and `diag(1, m_mu)` in frame coordinates.
    pub local_eps: Matrix3<T>,
    pub local_mu: Matrix3<T>,
    pub m_eps: Vec<Matrix3<T>>,
    pub m_mu: Vec<Matrix3<T>>,
    /// Quadrature weight times speed.
    pub measure: Vec<T>,
}

impl<T: Real> CurveSamples<T> {
    pub fn new<C: ParametricCurve<T> + ?Sized>(
        curve: &C,
        material: &Material<T>,
        quad: &QuadratureRule<T>,
    ) -> Result<Self> {
        material.validate()?;
        let jets = quad.nodes().iter().map(|&s| curve.jet(s)).collect::<Result<Vec<_>>>()?;
        let frames = frame_field_from_jets(quad.nodes(), &jets)?;
        let (e2, m2) = material.disk_tensors()?;
        let m_eps = lift_tensor(&frames, &e2, None)?.matrices;
        let m_mu = lift_tensor(&frames, &m2, None)?.matrices;
        let measure = quad.weights().iter().zip(&frames.speed).map(|(w, v)| *w * *v).collect();
        Ok(Self { jets, frames, local_eps: local_block(&e2.0), local_mu: local_block(&m2.0), m_eps, m_mu, measure })
    }

    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }
}

/// Direction-independent parts of the far-field integrand.
pub(crate) struct FarFieldKernel<T: Real> {
    pub points: Vec<Vector3<T>>,
    pub measure: Vec<T>,
    /// `M_mu (theta x A)` per node.
    pub mu_terms: Vec<CVec3<T>>,
    /// `M_eps A` per node.
    pub eps_terms: Vec<CVec3<T>>,
    pub mu_contrast: T,
    pub eps_contrast: T,
    pub prefactor: T,
    pub k: T,
    pub theta: Vector3<T>,
}

impl<T: Real> FarFieldKernel<T> {
    pub fn new(samples: &CurveSamples<T>, material: &Material<T>, wave: &PlaneWave<T>) -> Self {
        let ta = wave.theta_cross_a();
        let kr = wave.k * material.rho;
        Self {
            points: samples.jets.iter().map(|j| j.point).collect(),
            measure: samples.measure.clone(),
            mu_terms: samples.m_mu.iter().map(|m| real_mat_mul(m, &ta)).collect(),
            eps_terms: samples.m_eps.iter().map(|m| real_mat_mul(m, &wave.polarization)).collect(),
            mu_contrast: material.mu_r - T::one(),
            eps_contrast: material.eps_r - T::one(),
            prefactor: kr * kr * T::pi(),
            k: wave.k,
            theta: wave.theta,
        }
    }

    /// `exp(i k (theta - xhat) . p_q)`.
    #[inline]
    pub fn phase(&self, xhat: &Vector3<T>, q: usize) -> Complex<T> {
        cis(self.k * (self.theta - xhat).dot(&self.points[q]))
    }

    /// Applies the direction-dependent projections to the node sums
    /// `sum c_q a_q` (magnetic) and `sum c_q v_q` (electric).
    #[inline]
    pub fn project(&self, xhat: &Vector3<T>, mu_sum: &CVec3<T>, eps_sum: &CVec3<T>) -> CVec3<T> {
        let magnetic = real_cross(xhat, mu_sum);
        let along = real_dot(xhat, eps_sum);
        let electric = eps_sum - xhat.map(|x| along.scale(x));
        (electric.map(|c| c.scale(self.eps_contrast)) - magnetic.map(|c| c.scale(self.mu_contrast)))
            .map(|c| c.scale(self.prefactor))
    }

    pub fn sample(&self, xhat: &Vector3<T>) -> CVec3<T> {
        let mut mu_sum = CVec3::zeros();
        let mut eps_sum = CVec3::zeros();
        for q in 0..self.points.len() {
            let w = self.phase(xhat, q).scale(self.measure[q]);
            mu_sum += self.mu_terms[q].map(|c| c * w);
            eps_sum += self.eps_terms[q].map(|c| c * w);
        }
        self.project(xhat, &mu_sum, &eps_sum)
    }
}

/// Leading-order far field of the thin tube around `curve` at `directions`.
pub fn far_field<T: Real, C: ParametricCurve<T> + ?Sized>(
    curve: &C,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    directions: &[Vector3<T>],
    quad: &QuadratureRule<T>,
) -> Result<Vec<CVec3<T>>> {
    wave.validate()?;
    let samples = CurveSamples::new(curve, material, quad)?;
    Ok(far_field_from_samples(&samples, material, wave, directions))
}

pub fn far_field_from_samples<T: Real>(
    samples: &CurveSamples<T>,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    directions: &[Vector3<T>],
) -> Vec<CVec3<T>> {
    let kernel = FarFieldKernel::new(samples, material, wave);
    directions.par_iter().map(|x| kernel.sample(x)).collect()
}

/// Far field on every direction of `grid`; returns a copy carrying samples.
pub fn far_field_grid<T: Real, C: ParametricCurve<T> + ?Sized>(
    curve: &C,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    grid: &FarFieldGrid<T>,
    quad: &QuadratureRule<T>,
) -> Result<FarFieldGrid<T>> {
    let samples = far_field(curve, material, wave, grid.directions(), quad)?;
    let mut out = grid.clone();
    out.set_samples(samples)?;
    Ok(out)
}

/// `Phi_k(r)`, `Phi_k'(r)` and `Phi_k''(r)` for `Phi_k = exp(i k r) / (4 pi r)`.
fn radial_derivatives<T: Real>(k: T, r: T) -> (Complex<T>, Complex<T>, Complex<T>) {
    let phi = cis(k * r).unscale(lit::<T>(4.0) * T::pi() * r);
    let inv = T::one() / r;
    let a = Complex::new(-inv, k);
    let d1 = phi * a;
    let d2 = phi * (a * a + Complex::new(inv * inv, T::zero()));
    (phi, d1, d2)
}

/// Dyadic Green's function `Phi_k I + k^-2 grad grad Phi_k` at `(x, y)`.
pub fn green_tensor<T: Real>(k: T, x: &Vector3<T>, y: &Vector3<T>) -> Matrix3<Complex<T>> {
    let d = x - y;
    let r = d.norm();
    let u = d / r;
    let (phi, d1, d2) = radial_derivatives(k, r);
    let kk = T::one() / (k * k);
    Matrix3::from_fn(|i, j| {
        let uu = u[i] * u[j];
        let id = if i == j { T::one() } else { T::zero() };
        phi.scale(id) + (d2.scale(uu) + (d1.unscale(r)).scale(id - uu)).scale(kk)
    })
}

fn green_apply<T: Real>(k: T, d: &Vector3<T>, a: &CVec3<T>) -> (CVec3<T>, CVec3<T>) {
    let r = d.norm();
    let u = d / r;
    let (phi, d1, d2) = radial_derivatives(k, r);
    let kk = T::one() / (k * k);
    let ua = real_dot(&u, a);
    let g = CVec3::from_fn(|i, _| {
        let radial = ua.scale(u[i]);
        a[i] * phi + (d2 * radial + d1.unscale(r) * (a[i] - radial)).scale(kk)
    });
    // curl_x (G a) = grad Phi x a
    let curl = real_cross(&u, a).map(|c| c * d1);
    (g, curl)
}

/// Leading-order scattered electric field at points away from the tube.
pub fn near_field<T: Real, C: ParametricCurve<T> + ?Sized>(
    curve: &C,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    points: &[Vector3<T>],
    quad: &QuadratureRule<T>,
) -> Result<Vec<CVec3<T>>> {
    wave.validate()?;
    let samples = CurveSamples::new(curve, material, quad)?;
    let limit = lit::<T>(MIN_OBSERVATION_DISTANCE);
    for (i, x) in points.iter().enumerate() {
        if samples.jets.iter().any(|j| !((x - j.point).norm() > limit)) {
            return Err(Error::ObservationTooClose(i));
        }
    }
    let k = wave.k;
    let mu_c = material.mu_r - T::one();
    let eps_c = (material.eps_r - T::one()) * k * k;
    let pref = material.rho * material.rho * T::pi();
    let sources: Vec<(CVec3<T>, CVec3<T>)> = samples
        .jets
        .iter()
        .enumerate()
        .map(|(q, j)| {
            let curl = real_mat_mul(&samples.m_mu[q], &wave.curl(&j.point));
            let field = real_mat_mul(&samples.m_eps[q], &wave.field(&j.point));
            (curl, field)
        })
        .collect();
    Ok(points
        .par_iter()
        .map(|x| {
            let mut acc = CVec3::zeros();
            for (q, j) in samples.jets.iter().enumerate() {
                let d = x - j.point;
                let (g_field, _) = green_apply(k, &d, &sources[q].1);
                let (_, curl) = green_apply(k, &d, &sources[q].0);
                let term = curl.map(|c| c.scale(mu_c)) + g_field.map(|c| c.scale(eps_c));
                acc += term.map(|c| c.scale(samples.measure[q]));
            }
            acc.map(|c| c.scale(pref))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurveSpline, NamedCurve};
    use crate::scalar::cnorm;

    fn wave(k: f64) -> PlaneWave<f64> {
        let theta = Vector3::new(1.0, -1.0, 1.0) / 3f64.sqrt();
        let a = CVec3::new(Complex::new(-1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(1.0, 1.0));
        PlaneWave::new(k, theta, a).unwrap()
    }

    fn torus() -> (CurveSpline<f64>, QuadratureRule<f64>) {
        let sp = NamedCurve::Torus.spline::<f64>(12).unwrap();
        let q = QuadratureRule::simpson(sp.partition(), 7).unwrap();
        (sp, q)
    }

    #[test]
    fn zero_contrast_gives_zero() {
        let (sp, q) = torus();
        let m = Material::new(1.0, 1.0, 0.03).unwrap();
        let g = FarFieldGrid::new(4).unwrap();
        let e = far_field(&sp, &m, &wave(2.1), g.directions(), &q).unwrap();
        assert!(e.iter().all(|v| cnorm(v) == 0.0));
        let x = [Vector3::new(5.0, 1.0, 0.0)];
        let n = near_field(&sp, &m, &wave(2.1), &x, &q).unwrap();
        assert_eq!(cnorm(&n[0]), 0.0);
    }

    #[test]
    fn transversal() {
        let (sp, q) = torus();
        let m = Material::new(2.5, 1.6, 0.03).unwrap();
        let g = FarFieldGrid::new(6).unwrap();
        let e = far_field(&sp, &m, &wave(2.1), g.directions(), &q).unwrap();
        for (x, v) in g.directions().iter().zip(&e) {
            assert!(real_dot(x, v).norm() < 1e-12 * cnorm(v).max(1e-300));
        }
    }

    #[test]
    fn green_reciprocity_and_helmholtz() {
        let k = 1.7;
        let x = Vector3::new(0.4, -1.0, 2.0);
        let y = Vector3::new(-0.3, 0.2, 0.5);
        let gxy = green_tensor(k, &x, &y);
        let gyx = green_tensor(k, &y, &x);
        assert!((gxy - gyx.transpose()).norm() < 1e-12);
        let a = CVec3::new(Complex::new(1.0, 0.5), Complex::new(-0.2, 0.0), Complex::new(0.0, 1.0));
        let (ga, _) = green_apply(k, &(x - y), &a);
        let direct = gxy * a;
        assert!(cnorm(&(ga - direct)) < 1e-14);
    }

    #[test]
    fn curl_of_green_matches_finite_differences() {
        let k = 1.3;
        let y = Vector3::new(0.1, 0.2, -0.3);
        let x = Vector3::new(1.0, -0.5, 0.8);
        let a = CVec3::new(Complex::new(0.3, -0.1), Complex::new(1.0, 0.0), Complex::new(0.0, 0.7));
        let h = 1e-6;
        let d = |i: usize| {
            let mut e = Vector3::zeros();
            e[i] = h;
            let (p, _) = green_apply(k, &(x + e - y), &a);
            let (m, _) = green_apply(k, &(x - e - y), &a);
            (p - m).map(|c| c.unscale(2.0 * h))
        };
        let (dx, dy, dz) = (d(0), d(1), d(2));
        let fd = CVec3::new(dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]);
        // curl of the grad grad part vanishes, leaving grad Phi x a
        let (_, curl) = green_apply(k, &(x - y), &a);
        assert!(cnorm(&(fd - curl)) < 1e-7 * cnorm(&curl));
    }

    #[test]
    fn observation_on_curve_is_rejected() {
        let (sp, q) = torus();
        let m = Material::new(2.5, 1.6, 0.03).unwrap();
        let on = [Vector3::new(3.0, 0.0, 0.0), sp.eval(0.0, 0).unwrap()];
        assert!(matches!(near_field(&sp, &m, &wave(2.1), &on, &q), Err(Error::ObservationTooClose(1))));
    }
}
