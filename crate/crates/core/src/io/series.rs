use std::io::Write;

use serde::{Deserialize, Serialize};

use super::text::fmt;
use crate::error::{Error, Result};
use crate::forward::{sphere_norm, FarFieldGrid};
use crate::scalar::Real;

/// A labelled `(x, y)` series, optionally annotated with a fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub slope: Option<f64>,
}

impl PlotSeries {
    pub fn new(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dimension(format!("{} x values, {} y values", x.len(), y.len())));
        }
        if let Some(i) = x.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i % x.len().max(1) + 1));
        }
        Ok(Self { label: label.into(), x, y, slope: None })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Least-squares slope of `log y` against `log x` over the points where
    /// both are positive.
    pub fn loglog_slope(&self) -> Result<f64> {
        let pts: Vec<(f64, f64)> =
            self.x.iter().zip(&self.y).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
        if pts.len() < 2 {
            return Err(Error::TooFewSeriesPoints { needed: 2, got: pts.len() });
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::Dimension("all x values coincide".into()));
        }
        Ok(sxy / sxx)
    }

    /// Two whitespace-separated columns after a commented header.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# {}", self.label)?;
        if let Some(s) = self.slope {
            writeln!(out, "# slope {}", fmt(s))?;
        }
        for (x, y) in self.x.iter().zip(&self.y) {
            writeln!(out, "{} {}", fmt(*x), fmt(*y))?;
        }
        Ok(())
    }
}

/// Builds the series from `(parameter, value)` pairs, fits the slope and writes it.
pub fn export_convergence_series<W: Write>(label: &str, runs: &[(f64, f64)], out: W) -> Result<PlotSeries> {
    if runs.len() < 2 {
        return Err(Error::TooFewSeriesPoints { needed: 2, got: runs.len() });
    }
    let mut series = PlotSeries::new(label, runs.iter().map(|r| r.0).collect(), runs.iter().map(|r| r.1).collect())?;
    series.slope = series.loglog_slope().ok();
    series.write(out)?;
    Ok(series)
}

/// `|E - E_ref| / |E_ref|` in the discrete sphere norm.
pub fn rel_diff<T: Real>(grid: &FarFieldGrid<T>, reference: &FarFieldGrid<T>) -> Result<T> {
    if grid.order() != reference.order() {
        return Err(Error::Dimension(format!("grid N = {} vs reference N = {}", grid.order(), reference.order())));
    }
    let denom = sphere_norm(reference)?;
    if denom == T::zero() {
        return Err(Error::ZeroDataNorm);
    }
    let diff: Vec<_> = grid.samples()?.iter().zip(reference.samples()?).map(|(a, b)| a - b).collect();
    let d = FarFieldGrid::new(grid.order())?.with_samples(diff)?;
    Ok(sphere_norm(&d)? / denom)
}
