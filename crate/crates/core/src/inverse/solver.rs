//! Gauss-Newton iteration with golden-section line search and the
//! regularization-halving stopping rule.

use log::{debug, info, warn};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::residual::{Contributions, Problem, ResidualSystem};
use crate::error::{Error, Result};
use crate::forward::{FarFieldGrid, PlaneWave, QuadratureRule};
use crate::geometry::CurveSpline;
use crate::polarization::Material;
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub s_max: f64,
    pub line_search_steps: usize,
    pub max_iterations: usize,
    /// Share of the objective above which a block dominates. If no block
    /// reaches it, the largest block is taken.
    pub dominance: f64,
    /// Relative decrease of the objective below which a line search counts
    /// as having found no step. Without it the iterates can creep along a
    /// flat valley while a penalty dominates and the weights never shrink.
    pub min_decrease: f64,
    /// Compare the analytic Jacobian against finite differences at the
    /// first iterate and log the result.
    pub check_derivatives: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha1: 0.2,
            alpha2: 0.9,
            s_max: 1.0,
            line_search_steps: 10,
            max_iterations: 250,
            dominance: 0.5,
            min_decrease: 1e-3,
            check_derivatives: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s_max > 0.0) || !self.s_max.is_finite() {
            return Err(Error::Config(format!("s_max must be positive, got {}", self.s_max)));
        }
        if !(self.alpha1 >= 0.0) || !(self.alpha2 >= 0.0) {
            return Err(Error::Config("regularization parameters must be nonnegative".into()));
        }
        if !(self.min_decrease >= 0.0 && self.min_decrease < 1.0) {
            return Err(Error::Config(format!("min_decrease {} outside [0, 1)", self.min_decrease)));
        }
        if !(self.dominance > 0.0 && self.dominance <= 1.0) {
            return Err(Error::Config(format!("dominance share {} outside (0, 1]", self.dominance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Step,
    HalveAlpha1,
    HalveAlpha2,
    Stop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockValues {
    pub data: f64,
    pub curvature: f64,
    pub length: f64,
}

/// One pass through the loop. Control points and objective refer to the
/// iterate the pass started from; `step` is the accepted step length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub control_points: Vec<[f64; 3]>,
    pub objective: f64,
    pub blocks: BlockValues,
    pub step: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub event: Event,
}

#[derive(Debug, Clone)]
pub struct Reconstruction<T: Real> {
    pub spline: CurveSpline<T>,
    pub records: Vec<IterationRecord>,
    /// `true` when the data block dominated at a zero step.
    pub stopped: bool,
    pub data_norm: T,
}

impl<T: Real> Reconstruction<T> {
    pub fn accepted_steps(&self) -> usize {
        self.records.iter().filter(|r| r.event == Event::Step).count()
    }
}

/// Least-squares solution of `min |J d + P|`. Uses a QR factorization and
/// falls back to a Levenberg shift `1e-10 |J|^2` if `J` is rank deficient.
pub fn gauss_newton_step<T: Real>(system: &ResidualSystem<T>) -> Result<DVector<T>> {
    let jac = system.jacobian.as_ref().ok_or_else(|| Error::Config("Gauss-Newton step needs the Jacobian".into()))?;
    least_squares_direction(jac, &system.residual)
}

pub(crate) fn least_squares_direction<T: Real>(jac: &DMatrix<T>, p: &DVector<T>) -> Result<DVector<T>> {
    let (rows, cols) = jac.shape();
    if rows != p.len() {
        return Err(Error::Dimension(format!("Jacobian has {rows} rows, residual {}", p.len())));
    }
    if p.iter().all(|v| *v == T::zero()) {
        return Ok(DVector::zeros(cols));
    }
    if rows >= cols {
        let qr = jac.clone().qr();
        let r = qr.r();
        let diag_max = (0..cols).fold(T::zero(), |m, i| m.max(r[(i, i)].abs()));
        let tol = diag_max * T::default_epsilon() * lit::<T>(rows.max(cols) as f64);
        let full_rank = diag_max > T::zero() && (0..cols).all(|i| r[(i, i)].abs() > tol);
        if full_rank {
            let mut rhs = -p.clone();
            qr.q_tr_mul(&mut rhs);
            let top = rhs.rows(0, cols).into_owned();
            if let Some(d) = r.solve_upper_triangular(&top) {
                return Ok(d);
            }
        }
    }
    warn!("rank-deficient Jacobian; using a Levenberg shift");
    let norm2 = jac.norm_squared();
    let shift = lit::<T>(1e-10) * if norm2 > T::zero() { norm2 } else { T::one() };
    let mut normal = jac.transpose() * jac;
    for i in 0..cols {
        normal[(i, i)] += shift;
    }
    let rhs = -(jac.transpose() * p);
    normal.cholesky().map(|c| c.solve(&rhs)).ok_or(Error::NotConverged { iterations: 0, residual: f64::NAN })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch<T> {
    pub step: T,
    pub value: T,
    pub evaluations: usize,
}

/// Golden-section search for a minimizer of `phi` on `[0, s_max]` with a
/// fixed number of bracket reductions.
///
/// Returns the final bracket midpoint when it improves on `phi(0)`, else
/// the best improving point evaluated on the way, else zero.
pub fn golden_section_search<T: Real, F: FnMut(T) -> T>(
    mut phi: F,
    s_max: T,
    steps: usize,
    min_decrease: f64,
) -> LineSearch<T> {
    let g = (lit::<T>(5.0).sqrt() - T::one()) * lit::<T>(0.5);
    let f0 = phi(T::zero());
    let margin = lit::<T>(min_decrease) * f0.abs();
    let improves = |v: T| v.is_finite() && v < f0 - margin;
    let mut evaluations = 1;
    let mut best = (T::zero(), f0);
    let note = |s: T, v: T, best: &mut (T, T)| {
        if improves(v) && v < best.1 {
            *best = (s, v);
        }
    };
    let (mut a, mut b) = (T::zero(), s_max);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    evaluations += 2;
    note(c, fc, &mut best);
    note(d, fd, &mut best);
    for _ in 0..steps {
        if fc < fd || !fd.is_finite() {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = phi(c);
            note(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = phi(d);
            note(d, fd, &mut best);
        }
        evaluations += 1;
    }
    if best.0 == T::zero() {
        return LineSearch { step: T::zero(), value: f0, evaluations };
    }
    let mid = (a + b) * lit::<T>(0.5);
    let fm = phi(mid);
    evaluations += 1;
    if improves(fm) && fm <= best.1 {
        LineSearch { step: mid, value: fm, evaluations }
    } else {
        LineSearch { step: best.0, value: best.1, evaluations }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Data,
    Curvature,
    Length,
}

/// Block that dominates the objective; ties go to data, then curvature.
pub fn dominant_block<T: Real>(c: &Contributions<T>, share: f64) -> Block {
    let total = c.total();
    let order = [(Block::Data, c.data), (Block::Curvature, c.curvature), (Block::Length, c.length)];
    if total > T::zero() {
        let limit = total * lit::<T>(share);
        if let Some((b, _)) = order.iter().find(|(_, v)| *v > limit) {
            return *b;
        }
    }
    let mut best = order[0];
    for item in &order[1..] {
        if item.1 > best.1 {
            best = *item;
        }
    }
    best.0
}

fn record<T: Real>(
    iteration: usize,
    coords: &[T],
    system: &ResidualSystem<T>,
    step: T,
    alphas: (T, T),
    event: Event,
) -> IterationRecord {
    let c = system.contributions();
    IterationRecord {
        iteration,
        control_points: coords.chunks_exact(3).map(|p| [to_f64(p[0]), to_f64(p[1]), to_f64(p[2])]).collect(),
        objective: to_f64(system.objective()),
        blocks: BlockValues { data: to_f64(c.data), curvature: to_f64(c.curvature), length: to_f64(c.length) },
        step: to_f64(step),
        alpha1: to_f64(alphas.0),
        alpha2: to_f64(alphas.1),
        event,
    }
}

/// Reconstructs the center curve from far-field `data`, starting at the open
/// spline `initial`.
pub fn reconstruct<T: Real>(
    initial: &CurveSpline<T>,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    data: &FarFieldGrid<T>,
    quad: &QuadratureRule<T>,
    config: &SolverConfig,
) -> Result<Reconstruction<T>> {
    reconstruct_with(initial, material, wave, data, quad, config, |_| {})
}

/// As [`reconstruct`], calling `observe` after every pass.
pub fn reconstruct_with<T: Real, F: FnMut(&IterationRecord)>(
    initial: &CurveSpline<T>,
    material: &Material<T>,
    wave: &PlaneWave<T>,
    data: &FarFieldGrid<T>,
    quad: &QuadratureRule<T>,
    config: &SolverConfig,
    mut observe: F,
) -> Result<Reconstruction<T>> {
    config.validate()?;
    if initial.is_closed() {
        return Err(Error::Config("the initial guess must be an open spline".into()));
    }
    let problem = Problem::new(initial.partition().clone(), *material, *wave, data, quad.clone())?;
    let mut coords = initial.coordinates();
    let mut alpha1 = lit::<T>(config.alpha1);
    let mut alpha2 = lit::<T>(config.alpha2);
    let s_max = lit::<T>(config.s_max);
    let mut records = Vec::new();
    let mut stopped = false;

    for iteration in 0..config.max_iterations {
        let system = problem.assemble(&coords, alpha1, alpha2, true).map_err(|e| match e {
            Error::ZeroSpeed(s) => {
                warn!("iterate {iteration} is irregular at s = {s}");
                Error::ZeroSpeed(s)
            }
            other => other,
        })?;
        if iteration == 0 && config.check_derivatives {
            let err =
                super::check::jacobian_error(&problem, &coords, alpha1, alpha2, system.jacobian.as_ref().unwrap())?;
            info!("initial Jacobian check: max relative column error {err:.3e}");
        }
        let direction = gauss_newton_step(&system)?;
        let ls = golden_section_search(
            |s| {
                let trial: Vec<T> = coords.iter().zip(direction.iter()).map(|(x, d)| *x + s * *d).collect();
                problem.objective(&trial, alpha1, alpha2)
            },
            s_max,
            config.line_search_steps,
            config.min_decrease,
        );
        let event = if ls.step > T::zero() {
            Event::Step
        } else {
            match dominant_block(&system.contributions(), config.dominance) {
                Block::Data => Event::Stop,
                Block::Curvature => Event::HalveAlpha1,
                Block::Length => Event::HalveAlpha2,
            }
        };
        let rec = record(iteration, &coords, &system, ls.step, (alpha1, alpha2), event);
        debug!("iteration {iteration}: objective {:.6e}, step {:.4}, {:?}", rec.objective, rec.step, event);
        observe(&rec);
        records.push(rec);
        match event {
            Event::Step => {
                for (x, d) in coords.iter_mut().zip(direction.iter()) {
                    *x += ls.step * *d;
                }
            }
            Event::HalveAlpha1 => alpha1 *= lit::<T>(0.5),
            Event::HalveAlpha2 => alpha2 *= lit::<T>(0.5),
            Event::Stop => {
                stopped = true;
                break;
            }
        }
    }
    if !stopped {
        info!("iteration limit {} reached", config.max_iterations);
    }
    Ok(Reconstruction { spline: problem.spline(&coords)?, records, stopped, data_norm: problem.data_norm() })
}
