//! Residual vector and Jacobian of the regularized least-squares functional.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex;
use rayon::prelude::*;

use super::frechet::ShapeKernel;
use crate::error::{Error, Result};
use crate::forward::{weighted_norm, CurveSamples, FarFieldGrid, FarFieldKernel, PlaneWave, QuadratureRule};
use crate::geometry::{spline_basis_matrix, CurveSpline, Partition};
use crate::polarization::Material;
use crate::scalar::{CVec3, Real};

/// Row ranges of the three residual blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    pub data: Range<usize>,
    pub curvature: Range<usize>,
    pub length: Range<usize>,
}

impl BlockLayout {
    /// `directions` far-field samples, `nodes` quadrature nodes, `points`
    /// control points.
    pub fn new(directions: usize, nodes: usize, points: usize) -> Self {
        let d = 6 * directions;
        let c = d + 3 * nodes;
        Self { data: 0..d, curvature: d..c, length: c..c + points - 1 }
    }

    pub fn len(&self) -> usize {
        self.length.end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `12 N (N - 1) + 3 ((M - 1)(n - 1) + 1) + (n - 1)`.
pub fn residual_length(grid_order: usize, per_segment: usize, points: usize) -> usize {
    12 * grid_order * (grid_order - 1) + 3 * ((per_segment - 1) * (points - 1) + 1) + (points - 1)
}

/// Squared norms of the data, curvature and length blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contributions<T> {
    pub data: T,
    pub curvature: T,
    pub length: T,
}

impl<T: Real> Contributions<T> {
    pub fn total(&self) -> T {
        self.data + self.curvature + self.length
    }
}

#[derive(Debug, Clone)]
pub struct ResidualSystem<T: Real> {
    pub residual: DVector<T>,
    /// Present when assembled with derivatives.
    pub jacobian: Option<DMatrix<T>>,
    pub layout: BlockLayout,
}

impl<T: Real> ResidualSystem<T> {
    /// `|P|^2`.
    pub fn objective(&self) -> T {
        self.residual.norm_squared()
    }

    pub fn contributions(&self) -> Contributions<T> {
        let sq = |r: &Range<usize>| self.residual.rows(r.start, r.len()).norm_squared();
        Contributions {
            data: sq(&self.layout.data),
            curvature: sq(&self.layout.curvature),
            length: sq(&self.layout.length),
        }
    }
}

/// Everything about the least-squares problem that stays fixed while the
/// control points move.
#[derive(Debug, Clone)]
pub struct Problem<T: Real> {
    partition: Partition<T>,
    material: Material<T>,
    wave: PlaneWave<T>,
    directions: Vec<nalgebra::Vector3<T>>,
    /// `sqrt(w_jl) / |E|`.
    row_scale: Vec<T>,
    data: Vec<CVec3<T>>,
    data_norm: T,
    quad: QuadratureRule<T>,
    b0: DMatrix<T>,
    b1: DMatrix<T>,
    b2: DMatrix<T>,
    layout: BlockLayout,
}

impl<T: Real> Problem<T> {
    /// Works with open splines on `partition`.
    pub fn new(
        partition: Partition<T>,
        material: Material<T>,
        wave: PlaneWave<T>,
        data: &FarFieldGrid<T>,
        quad: QuadratureRule<T>,
    ) -> Result<Self> {
        material.validate()?;
        wave.validate()?;
        let samples = data.samples()?;
        let data_norm = weighted_norm(data.weights(), samples);
        if !(data_norm > T::zero()) {
            return Err(Error::ZeroDataNorm);
        }
        if quad.segments() != partition.segments() {
            return Err(Error::NodeMismatch(format!(
                "quadrature has {} segments, partition {}",
                quad.segments(),
                partition.segments()
            )));
        }
        let b0 = spline_basis_matrix(&partition, quad.nodes(), 0, false)?;
        let b1 = spline_basis_matrix(&partition, quad.nodes(), 1, false)?;
        let b2 = spline_basis_matrix(&partition, quad.nodes(), 2, false)?;
        let layout = BlockLayout::new(data.len(), quad.len(), partition.len());
        Ok(Self {
            row_scale: data.weights().iter().map(|w| w.sqrt() / data_norm).collect(),
            directions: data.directions().to_vec(),
            data: samples.to_vec(),
            data_norm,
            partition,
            material,
            wave,
            quad,
            b0,
            b1,
            b2,
            layout,
        })
    }

    pub fn data_norm(&self) -> T {
        self.data_norm
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn partition(&self) -> &Partition<T> {
        &self.partition
    }

    pub fn quadrature(&self) -> &QuadratureRule<T> {
        &self.quad
    }

    pub fn spline(&self, coords: &[T]) -> Result<CurveSpline<T>> {
        if coords.len() != 3 * self.partition.len() {
            return Err(Error::PointCountMismatch { expected: 3 * self.partition.len(), got: coords.len() });
        }
        let points = coords.chunks_exact(3).map(|c| Vector3::new(c[0], c[1], c[2])).collect();
        CurveSpline::fit(self.partition.clone(), points, false)
    }

    /// `P_N` at `coords`, optionally with its Jacobian.
    pub fn assemble(&self, coords: &[T], alpha1: T, alpha2: T, jacobian: bool) -> Result<ResidualSystem<T>> {
        let spline = self.spline(coords)?;
        let samples = CurveSamples::new(&spline, &self.material, &self.quad)?;
        let rows = self.layout.len();
        let cols = coords.len();
        let mut residual = DVector::zeros(rows);

        // data block
        let kernel = FarFieldKernel::new(&samples, &self.material, &self.wave);
        let model: Vec<CVec3<T>> = self.directions.par_iter().map(|x| kernel.sample(x)).collect();
        for (r, (m, e)) in model.iter().zip(&self.data).enumerate() {
            let diff = m - e;
            for c in 0..3 {
                residual[6 * r + 2 * c] = diff[c].re * self.row_scale[r];
                residual[6 * r + 2 * c + 1] = diff[c].im * self.row_scale[r];
            }
        }

        // curvature block
        let sw: Vec<T> = self.quad.weights().iter().map(|w| w.sqrt()).collect();
        let base = self.layout.curvature.start;
        for (q, j) in samples.jets.iter().enumerate() {
            let k = curvature_vector(&j.d1, &j.d2);
            for c in 0..3 {
                residual[base + 3 * q + c] = alpha1 * sw[q] * k[c];
            }
        }

        // length block
        let speed = &samples.frames.speed;
        let segments = self.partition.segments();
        let total = self.quad.integrate(speed);
        let share = total / T::from_usize(segments).unwrap();
        let base = self.layout.length.start;
        for j in 0..segments {
            let part = self.quad.segment_rule(j).fold(T::zero(), |a, (q, w)| a + w * speed[q]);
            residual[base + j] = alpha2 * (share - part);
        }

        let jacobian = if jacobian { Some(self.jacobian(&samples, alpha1, alpha2, rows, cols)?) } else { None };
        Ok(ResidualSystem { residual, jacobian, layout: self.layout.clone() })
    }

    /// Objective only; `+inf` when the spline is not admissible.
    pub fn objective(&self, coords: &[T], alpha1: T, alpha2: T) -> T {
        match self.assemble(coords, alpha1, alpha2, false) {
            Ok(sys) => sys.objective(),
            Err(_) => T::max_value().unwrap(),
        }
    }

    fn jacobian(
        &self,
        samples: &CurveSamples<T>,
        alpha1: T,
        alpha2: T,
        rows: usize,
        cols: usize,
    ) -> Result<DMatrix<T>> {
        let n = self.partition.len();
        let nodes = self.quad.len();
        let mut jac = DMatrix::<T>::zeros(rows, cols);
        let kernel = ShapeKernel::new(samples, &self.material, &self.wave, &self.quad)?;

        // data block: one 6 x 3n slab per direction
        let slabs: Vec<Vec<T>> = self
            .directions
            .par_iter()
            .enumerate()
            .map(|(r, x)| {
                let mut acc = vec![Complex::new(T::zero(), T::zero()); 3 * cols];
                for q in 0..nodes {
                    let (pos, vel) = kernel.node_derivatives(x, q);
                    for i in 0..n {
                        let (a, b) = (self.b0[(q, i)], self.b1[(q, i)]);
                        for d in 0..3 {
                            for c in 0..3 {
                                acc[c * cols + 3 * i + d] += pos[(c, d)].scale(a) + vel[(c, d)].scale(b);
                            }
                        }
                    }
                }
                let s = self.row_scale[r];
                let mut out = vec![T::zero(); 6 * cols];
                for c in 0..3 {
                    for col in 0..cols {
                        let v = acc[c * cols + col];
                        out[(2 * c) * cols + col] = v.re * s;
                        out[(2 * c + 1) * cols + col] = v.im * s;
                    }
                }
                out
            })
            .collect();
        for (r, slab) in slabs.iter().enumerate() {
            for k in 0..6 {
                for col in 0..cols {
                    jac[(6 * r + k, col)] = slab[k * cols + col];
                }
            }
        }

        // curvature block
        let base = self.layout.curvature.start;
        for (q, j) in samples.jets.iter().enumerate() {
            let (k1, k2) = curvature_vector_derivative(&j.d1, &j.d2);
            let s = alpha1 * self.quad.weights()[q].sqrt();
            for i in 0..n {
                let (b1, b2) = (self.b1[(q, i)], self.b2[(q, i)]);
                if b1 == T::zero() && b2 == T::zero() {
                    continue;
                }
                let block = (k1 * b1 + k2 * b2) * s;
                for c in 0..3 {
                    for d in 0..3 {
                        jac[(base + 3 * q + c, 3 * i + d)] = block[(c, d)];
                    }
                }
            }
        }

        // length block: d|p'| = t . h'
        let base = self.layout.length.start;
        let segments = self.partition.segments();
        let inv = T::one() / T::from_usize(segments).unwrap();
        let tangents: Vec<Vector3<T>> = samples.frames.frames.iter().map(|f| f.tangent).collect();
        let mut total = DMatrix::<T>::zeros(1, cols);
        for q in 0..nodes {
            let w = self.quad.weights()[q];
            for i in 0..n {
                for d in 0..3 {
                    total[(0, 3 * i + d)] += w * self.b1[(q, i)] * tangents[q][d];
                }
            }
        }
        for jseg in 0..segments {
            let row = base + jseg;
            for col in 0..cols {
                jac[(row, col)] = total[(0, col)] * inv;
            }
            for (q, w) in self.quad.segment_rule(jseg) {
                for i in 0..n {
                    for d in 0..3 {
                        jac[(row, 3 * i + d)] -= w * self.b1[(q, i)] * tangents[q][d];
                    }
                }
            }
            for col in 0..cols {
                jac[(row, col)] *= alpha2;
            }
        }
        Ok(jac)
    }
}

/// Curvature vector `p''/|p'|^2 - (p'.p'') p'/|p'|^4`; its length is the curvature.
pub fn curvature_vector<T: Real>(d1: &Vector3<T>, d2: &Vector3<T>) -> Vector3<T> {
    let s2 = d1.norm_squared();
    d2 / s2 - d1 * (d1.dot(d2) / (s2 * s2))
}

/// Matrices `(K1, K2)` with `k' = K1 h' + K2 h''`.
pub fn curvature_vector_derivative<T: Real>(d1: &Vector3<T>, d2: &Vector3<T>) -> (Matrix3<T>, Matrix3<T>) {
    let s2 = d1.norm_squared();
    let s4 = s2 * s2;
    let s6 = s4 * s2;
    let pp = d1.dot(d2);
    let four = T::from_f64(4.0).unwrap();
    let two = T::from_f64(2.0).unwrap();
    let k2 = Matrix3::identity() / s2 - d1 * d1.transpose() / s4;
    let k1 = -(d2 * d1.transpose()) * (two / s4) - Matrix3::identity() * (pp / s4) - d1 * d2.transpose() / s4
        + d1 * d1.transpose() * (four * pp / s6);
    (k1, k2)
}

/// Builds the system for a spline on the problem's partition.
pub fn assemble_residual<T: Real>(
    spline: &CurveSpline<T>,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    data: &FarFieldGrid<T>,
    quad: &QuadratureRule<T>,
    alpha1: T,
    alpha2: T,
) -> Result<ResidualSystem<T>> {
    if spline.is_closed() {
        return Err(Error::Config("residual assembly expects an open spline".into()));
    }
    let problem = Problem::new(spline.partition().clone(), *material, *wave, data, quad.clone())?;
    problem.assemble(&spline.coordinates(), alpha1, alpha2, true)
}
