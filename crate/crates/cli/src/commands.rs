use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use thintube::forward::{far_field_grid, QuadratureRule};
use thintube::geometry::NamedCurve;
use thintube::inverse::{
    add_noise, jacobian_error, random_displacement, reconstruct_with, taylor_remainders, Event, Problem,
};
use thintube::io::{
    export_convergence_series, read_curve, read_far_field, rel_diff, write_curve, write_far_field, write_record,
    FarFieldHeader, RunConfig,
};
use thintube::polarization::{disk_tensor, numeric_cross_section_tensor, OracleOptions};
use thintube::{CurveSpline64, Error, FarFieldGrid64};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_CHECK: u8 = 4;

/// Largest accepted relative column error of the analytic Jacobian.
const JACOBIAN_TOLERANCE: f64 = 1e-5;
/// Smallest accepted Taylor remainder order of the far-field derivative.
const TAYLOR_ORDER: f64 = 1.9;

#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "derivative check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return EXIT_CHECK;
    }
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(
            Error::NotConverged { .. } | Error::ZeroSpeed(_) | Error::EmptyCrossSection | Error::RadiusTooLarge { .. },
        ) => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading config {}", p.display())),
        None => Ok(RunConfig::default()),
    }
}

fn load_curve(source: &str, points: usize) -> Result<CurveSpline64> {
    if let Some(named) = NamedCurve::parse(source) {
        return Ok(named.spline(points)?);
    }
    let file = File::open(source).with_context(|| format!("`{source}` is neither a named curve nor a readable file"))?;
    read_curve(BufReader::new(file)).with_context(|| format!("reading curve {source}"))
}

fn load_data(path: &Path) -> Result<(FarFieldHeader, FarFieldGrid64)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_far_field(BufReader::new(file)).with_context(|| format!("reading far field {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn synthesize(cfg: &RunConfig, curve: &CurveSpline64, per_segment: usize) -> Result<FarFieldGrid64> {
    let quad = QuadratureRule::simpson(curve.partition(), per_segment)?;
    let grid = FarFieldGrid64::new(cfg.grid)?;
    Ok(far_field_grid(curve, &cfg.material()?, &cfg.wave()?, &grid, &quad)?)
}

pub fn forward(config: Option<&Path>, curve: &str, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let spline = load_curve(curve, cfg.points)?;
    let grid = synthesize(&cfg, &spline, cfg.data_quadrature)?;
    let header = FarFieldHeader::new(cfg.grid, &cfg.wave()?, &cfg.material()?);
    let mut w = create(out)?;
    write_far_field(&header, &grid, &mut w)?;
    w.flush()?;
    info!("wrote {} directions (k = {:.6}) to {}", grid.len(), header.k, out.display());
    Ok(())
}

pub fn noise(data: &Path, level: f64, seed: u64, out: &Path) -> Result<()> {
    let (header, grid) = load_data(data)?;
    let noisy = add_noise(&grid, level, seed)?;
    let mut w = create(out)?;
    write_far_field(&header, &noisy, &mut w)?;
    w.flush()?;
    info!("relative noise {:.4} written to {}", rel_diff(&noisy, &grid)?, out.display());
    Ok(())
}

fn check_header(cfg: &RunConfig, header: &FarFieldHeader) -> Result<()> {
    let expected = FarFieldHeader::new(cfg.grid, &cfg.wave()?, &cfg.material()?);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let pairs = [
        ("N", header.n as f64, expected.n as f64),
        ("k", header.k, expected.k),
        ("eps_r", header.eps_r, expected.eps_r),
        ("mu_r", header.mu_r, expected.mu_r),
        ("rho", header.rho, expected.rho),
    ];
    for (name, got, want) in pairs {
        if !close(got, want) {
            return Err(Error::Config(format!("data file has {name} = {got}, configuration has {want}")).into());
        }
    }
    let vectors = [
        ("theta", header.theta, expected.theta),
        ("A_re", header.a_re, expected.a_re),
        ("A_im", header.a_im, expected.a_im),
    ];
    for (name, got, want) in vectors {
        if !(0..3).all(|i| close(got[i], want[i])) {
            return Err(Error::Config(format!("data file {name} {got:?} differs from configuration {want:?}")).into());
        }
    }
    Ok(())
}

pub fn reconstruct(config: Option<&Path>, data: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let (header, grid) = load_data(data)?;
    check_header(&cfg, &header)?;
    let initial = cfg.initial_spline()?;
    let quad = QuadratureRule::simpson(initial.partition(), cfg.quadrature)?;
    let log_path = with_suffix(out, ".log.jsonl");
    let mut log = create(&log_path)?;
    let mut log_error = None;
    let rec = reconstruct_with(&initial, &cfg.material()?, &cfg.wave()?, &grid, &quad, &cfg.solver, |r| {
        if log_error.is_none() {
            log_error = write_record(r, &mut log).err();
        }
        if r.event != Event::Step {
            info!("iteration {}: {:?} (objective {:.4e})", r.iteration, r.event, r.objective);
        }
    })?;
    if let Some(e) = log_error {
        return Err(e).with_context(|| format!("writing {}", log_path.display()));
    }
    log.flush()?;
    let curve_path = with_suffix(out, ".curve.txt");
    let mut w = create(&curve_path)?;
    write_curve(&rec.spline, &mut w)?;
    w.flush()?;
    let last = rec.records.last().map(|r| r.objective).unwrap_or(f64::NAN);
    if rec.stopped {
        info!("stopped after {} iterations, objective {last:.4e}", rec.records.len());
    } else {
        warn!("iteration limit reached ({}), objective {last:.4e}", rec.records.len());
    }
    println!("{}", curve_path.display());
    Ok(())
}

pub fn check_derivatives(config: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let cfg = load_config(config)?;
    let seed = seed.unwrap_or(cfg.seed);
    let (material, wave) = (cfg.material()?, cfg.wave()?);
    let base = cfg.initial_spline()?;
    let shift = |s: u64| -> Result<CurveSpline64> {
        let d = random_displacement(base.control_points().len(), 0.3, s);
        Ok(base.with_points(base.control_points().iter().zip(&d).map(|(p, q)| p + q).collect())?)
    };
    let target = shift(seed.wrapping_mul(2))?;
    let current = shift(seed.wrapping_mul(2).wrapping_add(1))?;
    let data = synthesize(&cfg, &target, cfg.data_quadrature)?;
    let quad = QuadratureRule::simpson(current.partition(), cfg.quadrature)?;
    let problem = Problem::new(current.partition().clone(), material, wave, &data, quad.clone())?;
    let coords = current.coordinates();
    let (a1, a2) = (cfg.solver.alpha1, cfg.solver.alpha2);
    let system = problem.assemble(&coords, a1, a2, true)?;
    let jac = system.jacobian.as_ref().expect("jacobian requested");
    let err = jacobian_error(&problem, &coords, a1, a2, jac)?;
    println!("jacobian: max relative column error {err:.3e} (tolerance {JACOBIAN_TOLERANCE:.0e})");

    let h = random_displacement(coords.len() / 3, 1.0, seed.wrapping_add(0x5eed));
    let report = taylor_remainders(&current, &h, &material, &wave, &data, &quad, 0.05, 4)?;
    let order = report.min_order();
    println!("far-field derivative: Taylor remainder order {order:.3} (required {TAYLOR_ORDER})");

    let mut failures = Vec::new();
    if err.is_nan() || err >= JACOBIAN_TOLERANCE {
        failures.push(format!("jacobian error {err:.3e}"));
    }
    if order.is_nan() || order < TAYLOR_ORDER {
        failures.push(format!("Taylor order {order:.3}"));
    }
    if !failures.is_empty() {
        bail!(CheckFailed(failures.join(", ")));
    }
    println!("pass");
    Ok(())
}

pub fn polarization(gamma0: f64, gamma1: f64, numeric: bool, resolution: usize) -> Result<()> {
    let m = if numeric {
        numeric_cross_section_tensor(
            |y1, y2| y1 * y1 + y2 * y2 <= 1.0,
            gamma0,
            gamma1,
            &OracleOptions::with_resolution(resolution),
        )?
    } else {
        disk_tensor(gamma0, gamma1)?
    };
    let m = m.matrix();
    println!("{} {}", m[(0, 0)], m[(0, 1)]);
    println!("{} {}", m[(1, 0)], m[(1, 1)]);
    Ok(())
}

const STUDY: [usize; 4] = [3, 5, 9, 17];
const REFERENCE: usize = 65;

pub fn convergence(config: Option<&Path>, curve: &str, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let spline = load_curve(curve, cfg.points)?;
    let reference = synthesize(&cfg, &spline, REFERENCE)?;
    let mut runs = Vec::new();
    for m in STUDY {
        let d = rel_diff(&synthesize(&cfg, &spline, m)?, &reference)?;
        println!("M = {m:2}: RelDiff {d:.6e}");
        runs.push((m as f64, d));
    }
    let mut w = create(out)?;
    let series = export_convergence_series(&format!("RelDiff vs M, reference M = {REFERENCE}"), &runs, &mut w)?;
    w.flush()?;
    if let Some(s) = series.slope {
        println!("log-log slope {s:.3}");
    }
    Ok(())
}
