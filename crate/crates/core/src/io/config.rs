use std::path::Path;

use nalgebra::Vector3;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::PlaneWave;
use crate::geometry::{straight_segment, CurveSpline, Partition};
use crate::inverse::SolverConfig;
use crate::polarization::Material;
use crate::scalar::CVec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialConfig {
    pub eps_r: f64,
    pub mu_r: f64,
    pub rho: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self { eps_r: 2.5, mu_r: 1.6, rho: 0.03 }
    }
}

/// Incident wave. `theta` need not be normalized. `k` overrides the
/// wavenumber derived from `frequency`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveConfig {
    pub frequency: f64,
    pub k: Option<f64>,
    pub theta: [f64; 3],
    pub a_re: [f64; 3],
    pub a_im: [f64; 3],
}

impl Default for WaveConfig {
    fn default() -> Self {
        Self { frequency: 1e8, k: None, theta: [1.0, -1.0, 1.0], a_re: [-1.0, 0.0, 1.0], a_im: [0.0, 1.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialGuess {
    /// Straight segment sampled onto `points` control points.
    Segment { start: [f64; 3], end: [f64; 3] },
    /// Explicit control points on a uniform partition.
    ControlPoints { points: Vec<[f64; 3]> },
}

impl Default for InitialGuess {
    fn default() -> Self {
        Self::Segment { start: [0.0, 2.0, 0.0], end: [1.0, 2.0, 0.0] }
    }
}

/// Everything a run needs apart from the curve and data files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialConfig,
    pub wave: WaveConfig,
    /// Sphere grid parameter `N`.
    pub grid: usize,
    /// Simpson nodes per segment for the reconstruction.
    pub quadrature: usize,
    /// Simpson nodes per segment for synthesized data.
    pub data_quadrature: usize,
    /// Number of spline control points.
    pub points: usize,
    pub initial: InitialGuess,
    pub solver: SolverConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            material: MaterialConfig::default(),
            wave: WaveConfig::default(),
            grid: 10,
            quadrature: 11,
            data_quadrature: 21,
            points: 30,
            initial: InitialGuess::default(),
            solver: SolverConfig::default(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.material()?;
        self.wave()?;
        self.solver.validate()?;
        if self.grid < 2 {
            return Err(Error::Config(format!("grid must be at least 2, got {}", self.grid)));
        }
        for (name, m) in [("quadrature", self.quadrature), ("data_quadrature", self.data_quadrature)] {
            if m < 3 || m.is_multiple_of(2) {
                return Err(Error::Config(format!("{name} must be odd and at least 3, got {m}")));
            }
        }
        if self.points < 4 {
            return Err(Error::Config(format!("points must be at least 4, got {}", self.points)));
        }
        if let InitialGuess::ControlPoints { points } = &self.initial {
            if points.len() != self.points {
                return Err(Error::Config(format!(
                    "initial guess has {} control points, config says {}",
                    points.len(),
                    self.points
                )));
            }
        }
        Ok(())
    }

    pub fn material(&self) -> Result<Material<f64>> {
        let m = self.material;
        Material::new(m.eps_r, m.mu_r, m.rho)
    }

    pub fn wavenumber(&self) -> Result<f64> {
        match self.wave.k {
            Some(k) => Ok(k),
            None => {
                if !(self.wave.frequency > 0.0) || !self.wave.frequency.is_finite() {
                    return Err(Error::Config(format!("frequency must be positive, got {}", self.wave.frequency)));
                }
                Ok(self.material()?.wavenumber(self.wave.frequency))
            }
        }
    }

    pub fn wave(&self) -> Result<PlaneWave<f64>> {
        let w = &self.wave;
        let theta = Vector3::from(w.theta);
        let norm = theta.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Config("theta must be a nonzero finite vector".into()));
        }
        let a = CVec3::from_fn(|i, _| Complex::new(w.a_re[i], w.a_im[i]));
        PlaneWave::new(self.wavenumber()?, theta / norm, a)
    }

    pub fn initial_spline(&self) -> Result<CurveSpline<f64>> {
        match &self.initial {
            InitialGuess::Segment { start, end } => {
                straight_segment(Vector3::from(*start), Vector3::from(*end), self.points)
            }
            InitialGuess::ControlPoints { points } => CurveSpline::fit(
                Partition::uniform(points.len())?,
                points.iter().map(|p| Vector3::from(*p)).collect(),
                false,
            ),
        }
    }
}
