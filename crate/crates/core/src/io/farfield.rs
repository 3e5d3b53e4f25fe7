use std::io::{BufRead, Write};

use nalgebra::Vector3;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::text::{fmt, fmt3, integer, reals, Lines};
use crate::error::{Error, Result};
use crate::forward::{FarFieldGrid, PlaneWave};
use crate::polarization::Material;
use crate::scalar::{CVec3, Real};

const MAGIC: &str = "thintube-farfield";

/// Metadata stored with far-field samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldHeader {
    pub n: usize,
    pub k: f64,
    pub theta: [f64; 3],
    pub a_re: [f64; 3],
    pub a_im: [f64; 3],
    pub eps_r: f64,
    pub mu_r: f64,
    pub rho: f64,
}

impl FarFieldHeader {
    pub fn new(n: usize, wave: &PlaneWave<f64>, material: &Material<f64>) -> Self {
        let a = wave.polarization;
        Self {
            n,
            k: wave.k,
            theta: wave.theta.into(),
            a_re: [a[0].re, a[1].re, a[2].re],
            a_im: [a[0].im, a[1].im, a[2].im],
            eps_r: material.eps_r,
            mu_r: material.mu_r,
            rho: material.rho,
        }
    }

    pub fn wave(&self) -> Result<PlaneWave<f64>> {
        let a = CVec3::from_fn(|i, _| Complex::new(self.a_re[i], self.a_im[i]));
        PlaneWave::new(self.k, Vector3::from(self.theta), a)
    }

    pub fn material(&self) -> Result<Material<f64>> {
        Material::new(self.eps_r, self.mu_r, self.rho)
    }
}

/// Header lines followed by one record per direction:
/// `j l y1 y2 y3 Re(E1) Im(E1) Re(E2) Im(E2) Re(E3) Im(E3)`.
pub fn write_far_field<W: Write>(header: &FarFieldHeader, grid: &FarFieldGrid<f64>, mut out: W) -> Result<()> {
    if header.n != grid.order() {
        return Err(Error::Dimension(format!("header N = {} but grid N = {}", header.n, grid.order())));
    }
    let samples = grid.samples()?;
    writeln!(out, "{MAGIC} 1")?;
    writeln!(out, "N {}", header.n)?;
    writeln!(out, "k {}", fmt(header.k))?;
    writeln!(out, "theta {}", fmt3(header.theta))?;
    writeln!(out, "A_re {}", fmt3(header.a_re))?;
    writeln!(out, "A_im {}", fmt3(header.a_im))?;
    writeln!(out, "eps_r {}", fmt(header.eps_r))?;
    writeln!(out, "mu_r {}", fmt(header.mu_r))?;
    writeln!(out, "rho {}", fmt(header.rho))?;
    for (idx, (d, e)) in grid.directions().iter().zip(samples).enumerate() {
        let (j, l) = grid.angles(idx);
        write!(out, "{j} {l} {}", fmt3([d.x, d.y, d.z]))?;
        for c in e.iter() {
            write!(out, " {} {}", fmt(c.re), fmt(c.im))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_far_field<R: BufRead>(input: R) -> Result<(FarFieldHeader, FarFieldGrid<f64>)> {
    let mut lines = Lines::new(input);
    let (line, version) = lines.keyed(MAGIC)?;
    if version.first().map(String::as_str) != Some("1") {
        return Err(Error::Parse { line, msg: "unsupported far-field format version".into() });
    }
    let (line, n) = lines.keyed("N")?;
    let n = integer(line, n.first().map(String::as_str).unwrap_or(""))?;
    let k = lines.keyed_reals("k", 1)?[0];
    let v3 = |v: Vec<f64>| [v[0], v[1], v[2]];
    let theta = v3(lines.keyed_reals("theta", 3)?);
    let a_re = v3(lines.keyed_reals("A_re", 3)?);
    let a_im = v3(lines.keyed_reals("A_im", 3)?);
    let eps_r = lines.keyed_reals("eps_r", 1)?[0];
    let mu_r = lines.keyed_reals("mu_r", 1)?[0];
    let rho = lines.keyed_reals("rho", 1)?[0];
    let header = FarFieldHeader { n, k, theta, a_re, a_im, eps_r, mu_r, rho };
    let grid = FarFieldGrid::<f64>::new(n)?;
    let mut samples = vec![None; grid.len()];
    let mut count = 0;
    while let Some((line, text)) = lines.next_line()? {
        let vals: Vec<&str> = text.split_whitespace().collect();
        if vals.len() != 11 {
            return Err(Error::Parse {
                line,
                msg: format!("far-field record {} has {} fields, expected 11", count + 1, vals.len()),
            });
        }
        let j = integer(line, vals[0])?;
        let l = integer(line, vals[1])?;
        if j == 0 || j >= n || l == 0 || l > 2 * n {
            return Err(Error::Dimension(format!(
                "record (j, l) = ({j}, {l}) at line {line} outside the N = {n} grid"
            )));
        }
        let v = reals(line, &vals[2..], 9)?;
        let idx = grid.index(j, l);
        let expected = grid.directions()[idx];
        if (Vector3::new(v[0], v[1], v[2]) - expected).norm() > 1e-12 {
            return Err(Error::Parse { line, msg: format!("direction of record ({j}, {l}) does not match the grid") });
        }
        if samples[idx].is_some() {
            return Err(Error::Parse { line, msg: format!("duplicate record ({j}, {l})") });
        }
        samples[idx] = Some(CVec3::new(Complex::new(v[3], v[4]), Complex::new(v[5], v[6]), Complex::new(v[7], v[8])));
        count += 1;
    }
    if count != grid.len() {
        return Err(Error::Dimension(format!("N = {n} needs {} records, found {count}", grid.len())));
    }
    let grid = grid.with_samples(samples.into_iter().map(Option::unwrap).collect())?;
    Ok((header, grid))
}

/// Converts a grid to `f64` for writing.
pub fn grid_to_f64<T: Real>(grid: &FarFieldGrid<T>) -> Result<FarFieldGrid<f64>> {
    let out = FarFieldGrid::<f64>::new(grid.order())?;
    let samples = grid
        .samples()?
        .iter()
        .map(|v| v.map(|c| Complex::new(crate::scalar::to_f64(c.re), crate::scalar::to_f64(c.im))))
        .collect();
    out.with_samples(samples)
}
