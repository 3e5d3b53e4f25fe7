//! Finite-difference verification of the analytic derivatives.

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frechet::frechet_t;
use super::residual::Problem;
use crate::error::Result;
use crate::forward::{far_field, weighted_norm, FarFieldGrid, PlaneWave, QuadratureRule};
use crate::geometry::CurveSpline;
use crate::polarization::Material;
use crate::scalar::{lit, to_f64, Real};

/// `count` vectors with coordinates uniform on `[-amplitude, amplitude]`.
pub fn random_displacement<T: Real>(count: usize, amplitude: f64, seed: u64) -> Vec<Vector3<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Vector3::from_fn(|_, _| lit(amplitude * rng.random_range(-1.0..=1.0)))).collect()
}

/// Largest relative column error between `jac` and central differences of
/// the residual with step `1e-6` times the coordinate scale.
pub fn jacobian_error<T: Real>(
    problem: &Problem<T>,
    coords: &[T],
    alpha1: T,
    alpha2: T,
    jac: &DMatrix<T>,
) -> Result<f64> {
    let scale = coords.iter().fold(T::one(), |m, x| m.max(x.abs()));
    let h = lit::<T>(1e-6) * scale;
    let fd = finite_difference_jacobian(problem, coords, alpha1, alpha2, h)?;
    let largest = (0..fd.ncols()).fold(0.0f64, |m, c| m.max(to_f64(fd.column(c).norm())));
    let mut worst = 0.0f64;
    for c in 0..fd.ncols() {
        let diff = to_f64((jac.column(c) - fd.column(c)).norm());
        let denom = to_f64(fd.column(c).norm()).max(1e-8 * largest).max(f64::MIN_POSITIVE);
        worst = worst.max(diff / denom);
    }
    Ok(worst)
}

pub fn finite_difference_jacobian<T: Real>(
    problem: &Problem<T>,
    coords: &[T],
    alpha1: T,
    alpha2: T,
    h: T,
) -> Result<DMatrix<T>> {
    let rows = problem.layout().len();
    let mut fd = DMatrix::zeros(rows, coords.len());
    let mut x = coords.to_vec();
    for c in 0..coords.len() {
        x[c] = coords[c] + h;
        let plus = problem.assemble(&x, alpha1, alpha2, false)?.residual;
        x[c] = coords[c] - h;
        let minus = problem.assemble(&x, alpha1, alpha2, false)?.residual;
        x[c] = coords[c];
        fd.set_column(c, &((plus - minus) / (h + h)));
    }
    Ok(fd)
}

/// Remainders `|T(p + e h) - T(p) - e T'(p) h|` for `e = eps0 / 2^i`,
/// `i = 0..octaves`, and the observed orders between consecutive ones.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorReport {
    pub epsilons: Vec<f64>,
    pub remainders: Vec<f64>,
    pub orders: Vec<f64>,
}

impl TaylorReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn taylor_remainders<T: Real>(
    spline: &CurveSpline<T>,
    displacement: &[Vector3<T>],
    material: &Material<T>,
    wave: &PlaneWave<T>,
    grid: &FarFieldGrid<T>,
    quad: &QuadratureRule<T>,
    eps0: T,
    octaves: usize,
) -> Result<TaylorReport> {
    let h = spline.with_points(displacement.to_vec())?;
    let base = far_field(spline, material, wave, grid.directions(), quad)?;
    let lin = frechet_t(spline, material, wave, grid.directions(), quad, &h)?;
    let mut epsilons = Vec::new();
    let mut remainders = Vec::new();
    let mut eps = eps0;
    for _ in 0..=octaves {
        let moved: Vec<_> = spline.control_points().iter().zip(displacement).map(|(p, d)| p + d * eps).collect();
        let trial = far_field(&spline.with_points(moved)?, material, wave, grid.directions(), quad)?;
        let diff: Vec<_> =
            trial.iter().zip(&base).zip(&lin).map(|((t, b), l)| t - b - l.map(|c| c.scale(eps))).collect();
        epsilons.push(to_f64(eps));
        remainders.push(to_f64(weighted_norm(grid.weights(), &diff)));
        eps *= lit::<T>(0.5);
    }
    let orders = remainders.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(TaylorReport { epsilons, remainders, orders })
}
