use std::io::{BufRead, Write};

use nalgebra::Vector3;

use super::text::{fmt, fmt3, integer, reals, Lines};
use crate::error::{Error, Result};
use crate::geometry::{CurveSpline, Partition};
use crate::scalar::{lit, to_f64, Real};

const MAGIC: &str = "thintube-curve";

/// Writes knots, control points and the closed flag.
///
/// ```text
/// thintube-curve 1
/// closed false
/// points <n>
/// <t_i> <x_i> <y_i> <z_i>      (n lines)
/// ```
pub fn write_curve<T: Real, W: Write>(spline: &CurveSpline<T>, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC} 1")?;
    writeln!(out, "closed {}", spline.is_closed())?;
    writeln!(out, "points {}", spline.control_points().len())?;
    for (t, p) in spline.partition().knots().iter().zip(spline.control_points()) {
        writeln!(out, "{} {}", fmt(to_f64(*t)), fmt3([to_f64(p.x), to_f64(p.y), to_f64(p.z)]))?;
    }
    Ok(())
}

pub fn read_curve<T: Real, R: BufRead>(input: R) -> Result<CurveSpline<T>> {
    let mut lines = Lines::new(input);
    let (line, version) = lines.keyed(MAGIC)?;
    if version.first().map(String::as_str) != Some("1") {
        return Err(Error::Parse { line, msg: "unsupported curve format version".into() });
    }
    let (line, closed) = lines.keyed("closed")?;
    let closed = match closed.first().map(String::as_str) {
        Some("true") => true,
        Some("false") => false,
        _ => return Err(Error::Parse { line, msg: "closed must be `true` or `false`".into() }),
    };
    let (line, count) = lines.keyed("points")?;
    let n = integer(line, count.first().map(String::as_str).unwrap_or(""))?;
    let mut knots = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let (line, text) = lines.next_line()?.ok_or_else(|| Error::Parse {
            line: lines.line() + 1,
            msg: format!("missing control point record {} of {n}", i + 1),
        })?;
        let vals: Vec<&str> = text.split_whitespace().collect();
        let v = reals(line, &vals, 4)?;
        knots.push(lit::<T>(v[0]));
        points.push(Vector3::new(lit::<T>(v[1]), lit::<T>(v[2]), lit::<T>(v[3])));
    }
    if let Some((line, _)) = lines.next_line()? {
        return Err(Error::Dimension(format!("extra record at line {line}; header announced {n} points")));
    }
    CurveSpline::fit(Partition::new(knots)?, points, closed)
}
