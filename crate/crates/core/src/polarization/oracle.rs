//! Finite-difference approximation of the cross-section polarization tensor.
//!
//! For each unit direction `e_j` the corrector `w_j` solves
//! `div(gamma grad w_j) = -div((gamma - gamma0) e_j)` on the square
//! `[-R, R]^2`, where `gamma = gamma1` on the cross-section `B` and `gamma0`
//! elsewhere. The tensor follows from
//! `(gamma1 - gamma0) |B| m_ij = int (gamma - gamma0) (delta_ij + d_i w_j)`.
//!
//! Nodal coefficients blend `gamma0` and `gamma1` by the inside fraction of the
//! surrounding cell; edges take the harmonic mean of their end nodes. Boundary
//! values are zero, or the dipole far field of the previous solve. The SPD
//! system is solved by conjugate gradients preconditioned with the
//! constant-coefficient Dirichlet Laplacian, inverted with sine transforms.

use std::sync::Arc;

use nalgebra::Matrix2;
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftNum, FftPlanner};

use super::tensor::PolTensor2D;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Number of grid intervals per side.
    pub resolution: usize,
    /// Half-width `R` of the truncated domain.
    pub truncation: f64,
    /// Relative residual at which CG stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Sub-samples per side used to estimate the inside fraction of a cell.
    pub subsamples: usize,
    /// Outer boundary data: the dipole far field of the current solution
    /// (refined `boundary_passes` times) or zero.
    pub dipole_boundary: bool,
    pub boundary_passes: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            resolution: 400,
            truncation: 8.0,
            tolerance: 1e-10,
            max_iterations: 500,
            subsamples: 8,
            dipole_boundary: true,
            boundary_passes: 3,
        }
    }
}

impl OracleOptions {
    pub fn with_resolution(resolution: usize) -> Self {
        Self { resolution, ..Self::default() }
    }
}

/// Sine transform `y_k = sum_j x_j sin(pi j k / n)`, `j, k = 1..n-1`, applied
/// to every row of a row-major `m x m` array (`m = n - 1`).
struct SineTransform<T: FftNum> {
    fft: Arc<dyn Fft<T>>,
    m: usize,
}

impl<T: FftNum + Real> SineTransform<T> {
    fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { fft: planner.plan_fft_forward(2 * (m + 1)), m }
    }

    fn rows(&self, data: &mut [T]) {
        let m = self.m;
        let len = 2 * (m + 1);
        let half = lit::<T>(0.5);
        data.par_chunks_mut(m).for_each_init(
            || vec![Complex::new(T::zero(), T::zero()); len],
            |buf, row| {
                buf[0] = Complex::new(T::zero(), T::zero());
                buf[m + 1] = Complex::new(T::zero(), T::zero());
                for j in 0..m {
                    buf[j + 1] = Complex::new(row[j], T::zero());
                    buf[len - 1 - j] = Complex::new(-row[j], T::zero());
                }
                self.fft.process(buf);
                for k in 0..m {
                    row[k] = -buf[k + 1].im * half;
                }
            },
        );
    }

    /// Two-dimensional transform (rows, then columns).
    fn apply2d(&self, data: &mut [T], scratch: &mut [T]) {
        let m = self.m;
        self.rows(data);
        transpose(data, scratch, m);
        self.rows(scratch);
        transpose(scratch, data, m);
    }
}

fn transpose<T: Copy + Send + Sync>(src: &[T], dst: &mut [T], m: usize) {
    dst.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = src[j * m + i];
        }
    });
}

struct Operator<T> {
    m: usize,
    /// Edge coefficient to the east neighbour of interior node `(i, j)`, indexed
    /// over all `(n + 1) x (n + 1)` nodes.
    east: Vec<T>,
    north: Vec<T>,
    n: usize,
}

impl<T: Real> Operator<T> {
    fn edge_e(&self, i: usize, j: usize) -> T {
        self.east[j * (self.n + 1) + i]
    }

    fn edge_n(&self, i: usize, j: usize) -> T {
        self.north[j * (self.n + 1) + i]
    }

    /// `y = A x` on interior nodes; `x` indexed as `(j - 1) * m + (i - 1)`.
    fn apply(&self, x: &[T], y: &mut [T]) {
        let m = self.m;
        y.par_chunks_mut(m).enumerate().for_each(|(jj, row)| {
            let j = jj + 1;
            for (ii, out) in row.iter_mut().enumerate() {
                let i = ii + 1;
                let xp = x[jj * m + ii];
                let mut acc = T::zero();
                let we = self.edge_e(i, j);
                let ww = self.edge_e(i - 1, j);
                let wn = self.edge_n(i, j);
                let ws = self.edge_n(i, j - 1);
                let xe = if ii + 1 < m { x[jj * m + ii + 1] } else { T::zero() };
                let xw = if ii > 0 { x[jj * m + ii - 1] } else { T::zero() };
                let xn = if jj + 1 < m { x[(jj + 1) * m + ii] } else { T::zero() };
                let xs = if jj > 0 { x[(jj - 1) * m + ii] } else { T::zero() };
                acc += we * (xp - xe) + ww * (xp - xw) + wn * (xp - xn) + ws * (xp - xs);
                *out = acc;
            }
        });
    }
}

// Fixed chunks keep the summation order independent of the thread count.
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    const CHUNK: usize = 4096;
    let partial: Vec<T> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).fold(T::zero(), |s, (p, q)| s + *p * *q))
        .collect();
    partial.into_iter().fold(T::zero(), |s, p| s + p)
}

/// Approximates the polarization tensor of `inside ⊂` unit disk with
/// interior coefficient `gamma1` and background `gamma0`.
pub fn numeric_cross_section_tensor<T, F>(
    inside: F,
    gamma0: T,
    gamma1: T,
    options: &OracleOptions,
) -> Result<PolTensor2D<T>>
where
    T: Real + FftNum,
    F: Fn(T, T) -> bool,
{
    if !(gamma0 > T::zero()) || !(gamma1 > T::zero()) {
        return Err(Error::NonPositiveParameter(format!("gamma0 = {}, gamma1 = {}", to_f64(gamma0), to_f64(gamma1))));
    }
    let n = options.resolution;
    if n < 4 {
        return Err(Error::InvalidGrid(format!("resolution {n} too small")));
    }
    let m = n - 1;
    let r = lit::<T>(options.truncation);
    let h = (r + r) / lit::<T>(n as f64);
    let coord = |i: usize| -r + h * lit::<T>(i as f64);

    let delta = gamma1 - gamma0;
    if delta == T::zero() {
        return Ok(PolTensor2D(Matrix2::identity()));
    }
    // Inside fraction of the dual cell around each node, from sub-samples.
    let sub = options.subsamples.max(1);
    let fraction = |x: T, y: T| -> T {
        let mut hits = 0usize;
        for b in 0..sub {
            for a in 0..sub {
                let dx = h * (lit::<T>((a as f64 + 0.5) / sub as f64) - lit::<T>(0.5));
                let dy = h * (lit::<T>((b as f64 + 0.5) / sub as f64) - lit::<T>(0.5));
                if inside(x + dx, y + dy) {
                    hits += 1;
                }
            }
        }
        lit::<T>(hits as f64 / (sub * sub) as f64)
    };
    let gamma: Vec<T> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| gamma0 + fraction(coord(i), coord(j)) * delta)
        .collect();
    let g = |i: usize, j: usize| gamma[j * (n + 1) + i];
    let harmonic = |a: T, b: T| (a + a) * b / (a + b);
    let mut east = vec![T::zero(); (n + 1) * (n + 1)];
    let mut north = vec![T::zero(); (n + 1) * (n + 1)];
    for j in 0..=n {
        for i in 0..=n {
            if i < n {
                east[j * (n + 1) + i] = harmonic(g(i, j), g(i + 1, j));
            }
            if j < n {
                north[j * (n + 1) + i] = harmonic(g(i, j), g(i, j + 1));
            }
        }
    }
    let op = Operator { m, east, north, n };
    // area of B as seen by the edge coefficients
    let contrast: T = op
        .east
        .iter()
        .chain(op.north.iter())
        .filter(|c| **c != T::zero())
        .fold(T::zero(), |acc, c| acc + (*c - gamma0));
    let area = contrast * h * h * lit::<T>(0.5) / delta;
    if area == T::zero() {
        return Err(Error::EmptyCrossSection);
    }

    let sine = SineTransform::<T>::new(m);
    let mut tensor = Matrix2::<T>::identity();
    for dir in 0..2 {
        // b_P = sum_Q (gamma_PQ - gamma0) e_dir . (x_Q - x_P)
        let mut rhs = vec![T::zero(); m * m];
        for jj in 0..m {
            for ii in 0..m {
                let (i, j) = (ii + 1, jj + 1);
                let v = if dir == 0 {
                    (op.edge_e(i, j) - gamma0) - (op.edge_e(i - 1, j) - gamma0)
                } else {
                    (op.edge_n(i, j) - gamma0) - (op.edge_n(i, j - 1) - gamma0)
                };
                rhs[jj * m + ii] = v * h;
            }
        }
        let mut boundary = vec![T::zero(); 4 * (n + 1)];
        let mut w = vec![T::zero(); m * m];
        let passes = if options.dipole_boundary { options.boundary_passes } else { 1 };
        for _ in 0..passes {
            let mut b = rhs.clone();
            // known boundary values move to the right-hand side
            for k in 1..n {
                let idx = |i: usize, j: usize| (j - 1) * m + (i - 1);
                b[idx(1, k)] += op.edge_e(0, k) * boundary_value(&boundary, n, 0, k);
                b[idx(n - 1, k)] += op.edge_e(n - 1, k) * boundary_value(&boundary, n, n, k);
                b[idx(k, 1)] += op.edge_n(k, 0) * boundary_value(&boundary, n, k, 0);
                b[idx(k, n - 1)] += op.edge_n(k, n - 1) * boundary_value(&boundary, n, k, n);
            }
            w = conjugate_gradient(&op, &sine, &b, &w, options)?;
            let flux = edge_flux(&op, &w, &boundary, gamma0, dir, h);
            // corrector far field  -(D . x) / (2 pi |x|^2),  D = flux / gamma0
            let two_pi = T::two_pi();
            for j in 0..=n {
                for i in 0..=n {
                    if i == 0 || j == 0 || i == n || j == n {
                        let (x, y) = (coord(i), coord(j));
                        let v = -(flux[0] * x + flux[1] * y) / (gamma0 * two_pi * (x * x + y * y));
                        set_boundary(&mut boundary, n, i, j, v);
                    }
                }
            }
        }
        let flux = edge_flux(&op, &w, &boundary, gamma0, dir, h);
        let denom = area * delta;
        tensor[(0, dir)] = flux[0] / denom;
        tensor[(1, dir)] = flux[1] / denom;
    }
    let sym = (tensor + tensor.transpose()) * lit::<T>(0.5);
    Ok(PolTensor2D(sym))
}

fn boundary_slot(n: usize, i: usize, j: usize) -> usize {
    if j == 0 {
        i
    } else if j == n {
        (n + 1) + i
    } else if i == 0 {
        2 * (n + 1) + j
    } else {
        3 * (n + 1) + j
    }
}

fn boundary_value<T: Copy>(b: &[T], n: usize, i: usize, j: usize) -> T {
    b[boundary_slot(n, i, j)]
}

fn set_boundary<T>(b: &mut [T], n: usize, i: usize, j: usize, v: T) {
    b[boundary_slot(n, i, j)] = v;
}

/// `int (gamma - gamma0)(e_dir + grad w)` summed over grid edges.
fn edge_flux<T: Real>(op: &Operator<T>, w: &[T], boundary: &[T], gamma0: T, dir: usize, h: T) -> [T; 2] {
    let (n, m) = (op.n, op.m);
    let nodal = |i: usize, j: usize| -> T {
        if i == 0 || j == 0 || i == n || j == n {
            boundary_value(boundary, n, i, j)
        } else {
            w[(j - 1) * m + (i - 1)]
        }
    };
    let mut flux = [T::zero(); 2];
    for j in 0..=n {
        for i in 0..=n {
            if i < n {
                let c = op.edge_e(i, j) - gamma0;
                if c != T::zero() {
                    let drive = if dir == 0 { h } else { T::zero() };
                    flux[0] += c * (drive + nodal(i + 1, j) - nodal(i, j)) * h;
                }
            }
            if j < n {
                let c = op.edge_n(i, j) - gamma0;
                if c != T::zero() {
                    let drive = if dir == 1 { h } else { T::zero() };
                    flux[1] += c * (drive + nodal(i, j + 1) - nodal(i, j)) * h;
                }
            }
        }
    }
    flux
}

fn conjugate_gradient<T: Real + FftNum>(
    op: &Operator<T>,
    sine: &SineTransform<T>,
    rhs: &[T],
    start: &[T],
    options: &OracleOptions,
) -> Result<Vec<T>> {
    let m = op.m;
    let len = m * m;
    let n = op.n;
    // eigenvalues of the unit-coefficient 5-point Dirichlet Laplacian
    let pi = T::pi();
    let nf = lit::<T>(n as f64);
    let four = lit::<T>(4.0);
    let two = lit::<T>(2.0);
    let cosines: Vec<T> = (1..=m).map(|k| (pi * lit::<T>(k as f64) / nf).cos()).collect();
    let scale = (two / nf) * (two / nf);
    let mut scratch = vec![T::zero(); len];
    let precondition = |r: &[T], z: &mut [T], scratch: &mut [T]| {
        z.copy_from_slice(r);
        sine.apply2d(z, scratch);
        z.par_chunks_mut(m).enumerate().for_each(|(l, row)| {
            for (k, v) in row.iter_mut().enumerate() {
                *v *= scale / (four - two * cosines[k] - two * cosines[l]);
            }
        });
        sine.apply2d(z, scratch);
    };

    let mut x = start.to_vec();
    let bnorm = dot(rhs, rhs).sqrt();
    if bnorm == T::zero() {
        return Ok(vec![T::zero(); len]);
    }
    let mut r = vec![T::zero(); len];
    op.apply(&x, &mut r);
    r.par_iter_mut().zip(rhs.par_iter()).for_each(|(ri, bi)| *ri = *bi - *ri);
    if dot(&r, &r).sqrt() <= lit::<T>(options.tolerance) * bnorm {
        return Ok(x);
    }
    let mut z = vec![T::zero(); len];
    precondition(&r, &mut z, &mut scratch);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); len];
    let tol = lit::<T>(options.tolerance) * bnorm;
    for _ in 0..options.max_iterations {
        op.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        x.par_iter_mut().zip(p.par_iter()).for_each(|(xi, pi)| *xi += alpha * *pi);
        r.par_iter_mut().zip(ap.par_iter()).for_each(|(ri, ai)| *ri -= alpha * *ai);
        if dot(&r, &r).sqrt() <= tol {
            return Ok(x);
        }
        precondition(&r, &mut z, &mut scratch);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(pi, zi)| *pi = *zi + beta * *pi);
    }
    Err(Error::NotConverged { iterations: options.max_iterations, residual: to_f64(dot(&r, &r).sqrt() / bnorm) })
}
