use nalgebra::Vector3;

use crate::error::Result;
use crate::geometry::ParametricCurve;
use crate::scalar::{lit, to_f64, Real};

const FINE: usize = 4000;

/// `count` points equally spaced in arc length. A closed curve omits the
/// repeated end point.
pub fn arc_length_samples<T: Real, C: ParametricCurve<T> + ?Sized>(
    curve: &C,
    count: usize,
    closed: bool,
) -> Result<Vec<Vector3<f64>>> {
    let pts: Vec<Vector3<f64>> = (0..=FINE)
        .map(|i| curve.point(lit::<T>(i as f64 / FINE as f64)).map(|p| p.map(to_f64)))
        .collect::<Result<_>>()?;
    let mut cum = vec![0.0; FINE + 1];
    for i in 1..=FINE {
        cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
    }
    let total = cum[FINE];
    let spacing = if closed { total / count as f64 } else { total / (count - 1).max(1) as f64 };
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let target = (spacing * k as f64).min(total);
        while seg + 1 < FINE && cum[seg + 1] < target {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let f = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
        out.push(pts[seg] + (pts[seg + 1] - pts[seg]) * f.clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Root-mean-square distance between arc-length samples of `candidate` and
/// `target`, minimized over reversal and (for a closed target) cyclic
/// shifts, divided by the diameter of the target.
pub fn relative_curve_distance<T, A, B>(candidate: &A, target: &B, target_closed: bool, count: usize) -> Result<f64>
where
    T: Real,
    A: ParametricCurve<T> + ?Sized,
    B: ParametricCurve<T> + ?Sized,
{
    let a = arc_length_samples(candidate, count, target_closed)?;
    let b = arc_length_samples(target, count, target_closed)?;
    let mut diameter: f64 = 0.0;
    for p in &b {
        for q in &b {
            diameter = diameter.max((p - q).norm());
        }
    }
    let shifts = if target_closed { count } else { 1 };
    let mut best = f64::INFINITY;
    for reverse in [false, true] {
        for shift in 0..shifts {
            let mut sum = 0.0;
            for i in 0..count {
                let j = if reverse { count - 1 - i } else { i };
                let j = (j + shift) % count;
                sum += (a[i] - b[j]).norm_squared();
            }
            best = best.min((sum / count as f64).sqrt());
        }
    }
    Ok(if diameter > 0.0 { best / diameter } else { best })
}
