//! Acceptance criteria 1-8. Each test prints one PASS/FAIL line.
//!
//! `cargo test -p thintube --test acceptance -- --nocapture --test-threads 1`

use std::time::Instant;

use nalgebra::{Rotation3, Unit, Vector3};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thintube::forward::*;
use thintube::geometry::{any_perpendicular, straight_segment, Frame, NamedCurve};
use thintube::inverse::*;
use thintube::polarization::*;
use thintube::scalar::CVec3;
use thintube::{CurveSpline64, FarFieldGrid64, Material64, PlaneWave64};

fn report(id: u32, name: &str, pass: bool, detail: String, start: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id} {verdict}: {name}: {detail} ({:.1} s)", start.elapsed().as_secs_f64());
    assert!(pass, "criterion {id} failed: {detail}");
}

fn wave(k: f64) -> PlaneWave64 {
    let theta = Vector3::new(1.0, -1.0, 1.0) / 3f64.sqrt();
    let a = CVec3::new(Complex::new(-1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(1.0, 1.0));
    PlaneWave::new(k, theta, a).unwrap()
}

fn frequency_setup(eps_r: f64, mu_r: f64) -> (Material64, PlaneWave64) {
    let m = Material::new(eps_r, mu_r, 0.03).unwrap();
    let w = wave(m.wavenumber(1e8));
    (m, w)
}

#[test]
fn criterion_1_polarization_spectral_law() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut fix, mut spill) = (0.0f64, 0.0f64);
    for &gamma in &[0.2, 1.0, 2.5, 10.0] {
        let m2 = disk_tensor(1.0, gamma).unwrap();
        let (lo, hi) = tensor_bounds(gamma);
        for _ in 0..200 {
            let t = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0f64)).normalize();
            let n0 = any_perpendicular(&t);
            let b0 = t.cross(&n0);
            let (s, c) = rng.random_range(0.0..std::f64::consts::TAU).sin_cos();
            let frame = Frame { tangent: t, normal: n0 * c + b0 * s, binormal: b0 * c - n0 * s };
            let m = lift_at(&frame, &local_block(&m2.0));
            fix = fix.max((m * t - t).norm());
            for ev in m.symmetric_eigenvalues().iter() {
                spill = spill.max(lo - ev).max(ev - hi);
            }
        }
    }
    let pass = fix < 1e-10 && spill <= 1e-12;
    report(1, "spectral law", pass, format!("max |Mt - t| = {fix:.2e}, max bound violation = {spill:.2e}"), start);
}

#[test]
fn criterion_2_oracle_agreement() {
    let start = Instant::now();
    let disk = |y1: f64, y2: f64| y1 * y1 + y2 * y2 <= 1.0;
    let mut pass = true;
    let mut detail = Vec::new();
    for &g1 in &[0.4, 2.5] {
        let exact = 2.0 / (g1 + 1.0);
        let errs: Vec<f64> = [200, 400, 800]
            .iter()
            .map(|&res| {
                let m = numeric_cross_section_tensor(disk, 1.0, g1, &OracleOptions::with_resolution(res)).unwrap();
                let diff = m.0 - nalgebra::Matrix2::identity() * exact;
                diff.iter().fold(0.0f64, |a, v| a.max(v.abs())) / exact
            })
            .collect();
        pass &= errs[1] < 0.02 && errs[0] > errs[1] && errs[1] > errs[2];
        detail.push(format!(
            "g1 = {g1}: {:.2}% / {:.2}% / {:.2}% at 200/400/800",
            100.0 * errs[0],
            100.0 * errs[1],
            100.0 * errs[2]
        ));
    }
    report(2, "oracle agreement", pass, detail.join("; "), start);
}

#[test]
fn criterion_3_derivative_exactness() {
    let start = Instant::now();
    let (m, w) = frequency_setup(2.5, 1.6);
    let base: CurveSpline64 = NamedCurve::Figure.spline(8).unwrap();
    let shifted = |seed| {
        let d = random_displacement(8, 0.3, seed);
        base.with_points(base.control_points().iter().zip(&d).map(|(p, q)| p + q).collect()).unwrap()
    };
    let mut worst_jac = 0.0f64;
    let mut worst_order = f64::INFINITY;
    for instance in 0..5u64 {
        let target = shifted(100 + 2 * instance);
        let current = shifted(101 + 2 * instance);
        let grid = FarFieldGrid::new(4).unwrap();
        let data =
            far_field_grid(&target, &m, &w, &grid, &QuadratureRule::simpson(target.partition(), 9).unwrap()).unwrap();
        let q = QuadratureRule::simpson(current.partition(), 5).unwrap();
        let p = Problem::new(current.partition().clone(), m, w, &data, q.clone()).unwrap();
        let coords = current.coordinates();
        let sys = p.assemble(&coords, 0.2, 0.9, true).unwrap();
        worst_jac = worst_jac.max(jacobian_error(&p, &coords, 0.2, 0.9, sys.jacobian.as_ref().unwrap()).unwrap());
        let h = random_displacement(8, 1.0, 500 + instance);
        let t = taylor_remainders(&current, &h, &m, &w, &grid, &q, 0.05, 4).unwrap();
        worst_order = worst_order.min(t.min_order());
    }
    let pass = worst_jac < 1e-5 && worst_order >= 1.9;
    report(
        3,
        "derivative exactness",
        pass,
        format!("max column error {worst_jac:.2e}, min Taylor order {worst_order:.3}"),
        start,
    );
}

fn max_rel(a: &[CVec3<f64>], b: &[CVec3<f64>]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn criterion_4_forward_invariants() {
    let start = Instant::now();
    let (m, w) = frequency_setup(2.5, 1.6);
    let torus: CurveSpline64 = NamedCurve::Torus.spline(30).unwrap();
    let q = QuadratureRule::simpson(torus.partition(), 11).unwrap();
    let grid = FarFieldGrid64::new(10).unwrap();
    let dirs = grid.directions();
    let e = far_field(&torus, &m, &w, dirs, &q).unwrap();

    let transversal = e
        .iter()
        .zip(dirs)
        .map(|(v, x)| (0..3).map(|i| v[i].scale(x[i])).sum::<Complex<f64>>().norm())
        .fold(0.0, f64::max);

    let m2 = Material { rho: 2.0 * m.rho, ..m };
    let e2 = far_field(&torus, &m2, &w, dirs, &q).unwrap();
    let rho_err = max_rel(&e2, &e.iter().map(|v| v.scale(4.0)).collect::<Vec<_>>());

    let shift = Vector3::new(0.4, -1.1, 0.7);
    let moved = torus.with_points(torus.control_points().iter().map(|p| p + shift).collect()).unwrap();
    let em = far_field(&moved, &m, &w, dirs, &q).unwrap();
    let phased: Vec<_> = e
        .iter()
        .zip(dirs)
        .map(|(v, x)| v.map(|c| c * Complex::from_polar(1.0, w.k * (w.theta - x).dot(&shift))))
        .collect();
    let shift_err = max_rel(&em, &phased);

    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(0.2, 0.9, -0.4)), 0.8);
    let rm = rot.matrix();
    let rtorus = thintube::geometry::CurveSpline::fit(
        torus.partition().clone(),
        torus.control_points().iter().map(|p| rm * p).collect(),
        true,
    )
    .unwrap();
    let rdirs: Vec<_> = dirs.iter().map(|x| rm * x).collect();
    let er = far_field(&rtorus, &m, &w.rotated(rm), &rdirs, &q).unwrap();
    let rotated: Vec<_> =
        e.iter().map(|v| CVec3::from_fn(|i, _| (0..3).map(|j| v[j].scale(rm[(i, j)])).sum())).collect();
    let rot_err = max_rel(&er, &rotated);

    let at = |mm: usize| {
        far_field_grid(&torus, &m, &w, &grid, &QuadratureRule::simpson(torus.partition(), mm).unwrap()).unwrap()
    };
    let reference = at(65);
    let errs: Vec<f64> = [3, 5, 9, 17].iter().map(|&mm| thintube::io::rel_diff(&at(mm), &reference).unwrap()).collect();
    let order = errs.windows(2).map(|p| (p[0] / p[1]).log2()).fold(f64::INFINITY, f64::min);

    let pass = transversal < 1e-12 && rho_err < 1e-12 && shift_err < 1e-10 && rot_err < 1e-10 && order >= 4.0;
    report(
        4,
        "forward invariants",
        pass,
        format!(
            "transversality {transversal:.1e}, rho^2 scaling {rho_err:.1e}, translation {shift_err:.1e}, rotation {rot_err:.1e}, Simpson order {order:.3}"
        ),
        start,
    );
}

struct Case {
    curve: NamedCurve,
    eps_r: f64,
    mu_r: f64,
    start: [f64; 3],
    end: [f64; 3],
}

const TORUS: Case =
    Case { curve: NamedCurve::Torus, eps_r: 2.5, mu_r: 1.6, start: [0.0, 2.0, 0.0], end: [1.0, 2.0, 0.0] };
const HELIX: Case =
    Case { curve: NamedCurve::Helix, eps_r: 2.1, mu_r: 1.0, start: [0.0, -1.0, 1.0], end: [0.0, -2.0, 1.0] };

/// Returns (passes, stopped, relative distance).
fn run(case: &Case, noise: Option<u64>) -> (usize, bool, f64) {
    let (m, w) = frequency_setup(case.eps_r, case.mu_r);
    let target: CurveSpline64 = case.curve.spline(30).unwrap();
    let grid = FarFieldGrid::new(10).unwrap();
    let mut data =
        far_field_grid(&target, &m, &w, &grid, &QuadratureRule::simpson(target.partition(), 21).unwrap()).unwrap();
    if let Some(seed) = noise {
        data = add_noise(&data, 0.3, seed).unwrap();
    }
    let init = straight_segment(Vector3::from(case.start), Vector3::from(case.end), 30).unwrap();
    let q = QuadratureRule::simpson(init.partition(), 11).unwrap();
    let cfg = SolverConfig::default();
    let rec = reconstruct(&init, &m, &w, &data, &q, &cfg).unwrap();
    let d = relative_curve_distance(&rec.spline, &target, case.curve.is_closed(), 200).unwrap();
    (rec.records.len(), rec.stopped, d)
}

fn reconstruction_criterion(id: u32, noise: Option<u64>, bound: f64) {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for case in [&TORUS, &HELIX] {
        let (passes, stopped, d) = run(case, noise);
        pass &= d < bound && passes <= 250;
        detail.push(format!("{} {:.2}% after {passes} iterations (stopped: {stopped})", case.curve.name(), 100.0 * d));
    }
    let name = if noise.is_some() { "reconstruction with 30% noise" } else { "inverse-crime reconstruction" };
    report(id, name, pass, detail.join("; "), start);
}

#[test]
fn criterion_5_inverse_crime_reconstruction() {
    reconstruction_criterion(5, None, 0.05);
}

#[test]
fn criterion_6_noise_robustness() {
    reconstruction_criterion(6, Some(7), 0.10);
}

#[test]
fn criterion_7_residual_bookkeeping() {
    let start = Instant::now();
    let (m, w) = frequency_setup(2.5, 1.6);
    let mut checked = 0;
    let mut pass = true;
    for n_grid in [2, 3, 5, 10] {
        for per in [3, 5, 11] {
            for n in [4, 7, 12, 30] {
                let curve: CurveSpline64 = NamedCurve::Helix.spline(n).unwrap();
                let data = far_field_grid(
                    &curve,
                    &m,
                    &w,
                    &FarFieldGrid::new(n_grid).unwrap(),
                    &QuadratureRule::simpson(curve.partition(), 5).unwrap(),
                )
                .unwrap();
                let q = QuadratureRule::simpson(curve.partition(), per).unwrap();
                let p = Problem::new(curve.partition().clone(), m, w, &data, q).unwrap();
                let len = p.assemble(&curve.coordinates(), 0.2, 0.9, false).unwrap().residual.len();
                let formula = 12 * n_grid * (n_grid - 1) + 3 * ((per - 1) * (n - 1) + 1) + (n - 1);
                pass &= len == formula && residual_length(n_grid, per, n) == formula;
                checked += 1;
            }
        }
    }
    report(7, "residual length", pass, format!("{checked} (N, M, n) combinations"), start);
}

#[test]
fn criterion_8_self_consistency_floor() {
    let start = Instant::now();
    let (m, w) = frequency_setup(2.5, 1.6);
    let mut worst = 0.0f64;
    for curve in [NamedCurve::Helix, NamedCurve::Figure] {
        let sp: CurveSpline64 = curve.spline(30).unwrap();
        let q = QuadratureRule::simpson(sp.partition(), 11).unwrap();
        let data = far_field_grid(&sp, &m, &w, &FarFieldGrid::new(10).unwrap(), &q).unwrap();
        let p = Problem::new(sp.partition().clone(), m, w, &data, q).unwrap();
        let sys = p.assemble(&sp.coordinates(), 0.0, 0.0, false).unwrap();
        worst = worst.max(sys.residual.amax());
    }
    let area = 4.0 * std::f64::consts::PI;
    let err = |n: usize| (FarFieldGrid64::new(n).unwrap().weight_sum() - area).abs() / area;
    let e10 = err(10);
    let order = (err(10) / err(20)).log2();
    let pass = worst < 1e-12 && e10 < 0.05 && (order - 2.0).abs() < 0.1;
    report(
        8,
        "self-consistency floor",
        pass,
        format!("max |P_N| entry {worst:.1e}, weight sum error {:.2}% at N = 10, order {order:.3}", 100.0 * e10),
        start,
    );
}
