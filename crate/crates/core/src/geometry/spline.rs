//! Interpolating cubic splines in R^3.
//!
//! Open curves use not-a-knot end conditions (third derivative continuous
//! across `t_2` and `t_{n-1}`); closed curves use periodic conditions and
//! expect the last control point to repeat the first. The spline is stored
//! through its knot values and second-derivative moments, which are a fixed
//! linear function of the control points.

use nalgebra::{DMatrix, Vector3};

use super::curve::{CurveJet, ParametricCurve};
use super::partition::Partition;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone)]
pub struct CurveSpline<T: Real> {
    partition: Partition<T>,
    points: Vec<Vector3<T>>,
    moments: Vec<Vector3<T>>,
    closed: bool,
}

/// Linear map from knot values to spline moments, `M = A^{-1} D y`.
pub(crate) fn moment_operator<T: Real>(partition: &Partition<T>, closed: bool) -> Result<DMatrix<T>> {
    let n = partition.len();
    let h = |i: usize| partition.width(i);
    let six = lit::<T>(6.0);
    let two = lit::<T>(2.0);
    let mut a = DMatrix::<T>::zeros(n, n);
    let mut d = DMatrix::<T>::zeros(n, n);

    for i in 1..n - 1 {
        let (hl, hr) = (h(i - 1), h(i));
        a[(i, i - 1)] = hl;
        a[(i, i)] = two * (hl + hr);
        a[(i, i + 1)] = hr;
        d[(i, i + 1)] = six / hr;
        d[(i, i)] = -six / hr - six / hl;
        d[(i, i - 1)] = six / hl;
    }
    if closed {
        // slope continuity across the seam, with segment n-2 preceding segment 0
        let (hl, hr) = (h(n - 2), h(0));
        a[(0, n - 2)] = hl;
        a[(0, 0)] = two * (hl + hr);
        a[(0, 1)] = hr;
        d[(0, 1)] += six / hr;
        d[(0, 0)] -= six / hr;
        d[(0, n - 1)] -= six / hl;
        d[(0, n - 2)] += six / hl;
        a[(n - 1, n - 1)] = T::one();
        a[(n - 1, 0)] = -T::one();
    } else {
        // not-a-knot: equal third derivatives on both sides of t_2 and t_{n-1}
        let (h0, h1) = (h(0), h(1));
        a[(0, 0)] = h1;
        a[(0, 1)] = -(h0 + h1);
        a[(0, 2)] = h0;
        let (ha, hb) = (h(n - 3), h(n - 2));
        a[(n - 1, n - 3)] = hb;
        a[(n - 1, n - 2)] = -(ha + hb);
        a[(n - 1, n - 1)] = ha;
    }
    let lu = a.lu();
    lu.solve(&d).ok_or_else(|| Error::InvalidPartition("singular spline system".into()))
}

/// Weights of `(y_i, y_{i+1}, M_i, M_{i+1})` for the `order`-th derivative
/// on segment `i` at parameter `s`.
pub(crate) fn segment_weights<T: Real>(partition: &Partition<T>, i: usize, s: T, order: usize) -> [T; 4] {
    let hw = partition.width(i);
    let a = partition.knots()[i + 1] - s;
    let b = s - partition.knots()[i];
    let six = lit::<T>(6.0);
    let two = lit::<T>(2.0);
    match order {
        0 => [a / hw, b / hw, a * a * a / (six * hw) - hw * a / six, b * b * b / (six * hw) - hw * b / six],
        1 => [-T::one() / hw, T::one() / hw, -a * a / (two * hw) + hw / six, b * b / (two * hw) - hw / six],
        2 => [T::zero(), T::zero(), a / hw, b / hw],
        _ => [T::zero(), T::zero(), -T::one() / hw, T::one() / hw],
    }
}

impl<T: Real> CurveSpline<T> {
    /// Interpolates `points` at the knots of `partition`.
    pub fn fit(partition: Partition<T>, points: Vec<Vector3<T>>, closed: bool) -> Result<Self> {
        let n = partition.len();
        if points.len() != n {
            return Err(Error::PointCountMismatch { expected: n, got: points.len() });
        }
        if closed {
            let gap = (points[n - 1] - points[0]).norm();
            let scale = points.iter().map(|p| p.norm()).fold(T::one(), |m, x| m.max(x));
            if gap > lit::<T>(1e-12) * scale {
                return Err(Error::InvalidPartition(format!(
                    "closed spline needs last control point equal to first (gap {:e})",
                    to_f64(gap)
                )));
            }
        }
        let op = moment_operator(&partition, closed)?;
        let moments = (0..n)
            .map(|i| {
                let mut m = Vector3::zeros();
                for (j, p) in points.iter().enumerate() {
                    m += p * op[(i, j)];
                }
                m
            })
            .collect();
        Ok(Self { partition, points, moments, closed })
    }

    pub fn partition(&self) -> &Partition<T> {
        &self.partition
    }

    pub fn control_points(&self) -> &[Vector3<T>] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Refit with new control points on the same partition.
    pub fn with_points(&self, points: Vec<Vector3<T>>) -> Result<Self> {
        Self::fit(self.partition.clone(), points, self.closed)
    }

    /// Control points flattened point-major: `(x_1, y_1, z_1, x_2, ...)`.
    pub fn coordinates(&self) -> Vec<T> {
        self.points.iter().flat_map(|p| [p.x, p.y, p.z]).collect()
    }

    pub fn from_coordinates(&self, coords: &[T]) -> Result<Self> {
        if coords.len() != 3 * self.points.len() {
            return Err(Error::PointCountMismatch { expected: 3 * self.points.len(), got: coords.len() });
        }
        self.with_points(coords.chunks_exact(3).map(|c| Vector3::new(c[0], c[1], c[2])).collect())
    }

    /// Value (`order = 0`) or derivative of order 1..=3 at `s`.
    /// The third derivative is piecewise constant and taken as the left limit at knots.
    pub fn eval(&self, s: T, order: usize) -> Result<Vector3<T>> {
        if order > 3 {
            return Err(Error::InvalidOrder(order));
        }
        self.partition.check_parameter(s)?;
        let i = self.partition.locate(s);
        Ok(self.eval_in_segment(i, s, order))
    }

    fn eval_in_segment(&self, i: usize, s: T, order: usize) -> Vector3<T> {
        let w = segment_weights(&self.partition, i, s, order);
        self.points[i] * w[0] + self.points[i + 1] * w[1] + self.moments[i] * w[2] + self.moments[i + 1] * w[3]
    }
}

impl<T: Real> ParametricCurve<T> for CurveSpline<T> {
    fn jet(&self, s: T) -> Result<CurveJet<T>> {
        self.partition.check_parameter(s)?;
        let i = self.partition.locate(s);
        Ok(CurveJet {
            point: self.eval_in_segment(i, s, 0),
            d1: self.eval_in_segment(i, s, 1),
            d2: self.eval_in_segment(i, s, 2),
            d3: self.eval_in_segment(i, s, 3),
        })
    }
}

/// Dense matrix `B` with `(B y)_q` equal to the `order`-th derivative at
/// `nodes[q]` of the scalar spline through knot values `y`.
pub fn spline_basis_matrix<T: Real>(
    partition: &Partition<T>,
    nodes: &[T],
    order: usize,
    closed: bool,
) -> Result<DMatrix<T>> {
    if order > 3 {
        return Err(Error::InvalidOrder(order));
    }
    let n = partition.len();
    let op = moment_operator(partition, closed)?;
    let mut b = DMatrix::<T>::zeros(nodes.len(), n);
    for (q, &s) in nodes.iter().enumerate() {
        partition.check_parameter(s)?;
        let i = partition.locate(s);
        let w = segment_weights(partition, i, s, order);
        b[(q, i)] += w[0];
        b[(q, i + 1)] += w[1];
        for j in 0..n {
            b[(q, j)] += w[2] * op[(i, j)] + w[3] * op[(i + 1, j)];
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(t: f64) -> Vector3<f64> {
        Vector3::new(t * t * t, t, 1.0)
    }

    fn nonuniform() -> Partition<f64> {
        Partition::new(vec![0.0, 0.1, 0.35, 0.4, 0.7, 0.85, 1.0]).unwrap()
    }

    #[test]
    fn reproduces_cubic_with_not_a_knot() {
        for part in [Partition::uniform(4).unwrap(), nonuniform()] {
            let pts = part.knots().iter().map(|&t| cubic(t)).collect();
            let sp = CurveSpline::fit(part, pts, false).unwrap();
            for k in 0..=200 {
                let t = k as f64 / 200.0;
                assert!((sp.eval(t, 0).unwrap() - cubic(t)).norm() < 1e-10);
                let d1 = Vector3::new(3.0 * t * t, 1.0, 0.0);
                assert!((sp.eval(t, 1).unwrap() - d1).norm() < 1e-10);
                let d3 = sp.eval(t, 3).unwrap();
                assert!((d3 - Vector3::new(6.0, 0.0, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn interpolates_knots_exactly() {
        let part = nonuniform();
        let pts: Vec<_> =
            (0..part.len()).map(|i| Vector3::new((i as f64).sin(), (i * i) as f64, -(i as f64))).collect();
        let sp = CurveSpline::fit(part.clone(), pts.clone(), false).unwrap();
        for (t, p) in part.knots().iter().zip(&pts) {
            assert!((sp.eval(*t, 0).unwrap() - p).norm() < 1e-12);
        }
    }

    #[test]
    fn straight_segment_has_constant_derivative() {
        let part = Partition::uniform(6).unwrap();
        let pts = part.knots().iter().map(|&t| Vector3::new(t, 0.0, 0.0)).collect();
        let sp = CurveSpline::fit(part, pts, false).unwrap();
        for k in 0..=50 {
            let d = sp.eval(k as f64 / 50.0, 1).unwrap();
            assert!((d - Vector3::x()).norm() < 1e-12);
        }
    }

    #[test]
    fn third_derivative_continuous_across_second_knot() {
        let part = nonuniform();
        let pts: Vec<_> =
            (0..part.len()).map(|i| Vector3::new((i as f64 * 0.7).cos(), (i as f64).sqrt(), 0.3 * i as f64)).collect();
        let sp = CurveSpline::fit(part.clone(), pts, false).unwrap();
        let t2 = part.knots()[1];
        let tm = part.knots()[part.len() - 2];
        let eps = 1e-9;
        assert!((sp.eval(t2, 3).unwrap() - sp.eval(t2 + eps, 3).unwrap()).norm() < 1e-8);
        assert!((sp.eval(tm, 3).unwrap() - sp.eval(tm + eps, 3).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn closed_spline_is_periodic() {
        let part = Partition::<f64>::uniform(12).unwrap();
        let pts: Vec<_> = part
            .knots()
            .iter()
            .map(|&t| {
                let a = 2.0 * std::f64::consts::PI * t;
                Vector3::new(a.cos() + 1.0, a.sin() + 1.0, -1.0)
            })
            .collect();
        let sp = CurveSpline::fit(part, pts, true).unwrap();
        for order in 0..3 {
            let d = sp.eval(0.0, order).unwrap() - sp.eval(1.0, order).unwrap();
            assert!(d.norm() < 1e-10, "order {order} mismatch {d}");
        }
        assert!((sp.eval(0.0, 0).unwrap() - Vector3::new(2.0, 1.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn closed_spline_requires_repeated_endpoint() {
        let part = Partition::<f64>::uniform(5).unwrap();
        let pts = (0..5).map(|i| Vector3::new(i as f64, 0.0, 0.0)).collect();
        assert!(CurveSpline::fit(part, pts, true).is_err());
    }

    #[test]
    fn eval_rejects_out_of_range() {
        let part = Partition::uniform(4).unwrap();
        let pts = part.knots().iter().map(|&t| cubic(t)).collect();
        let sp = CurveSpline::fit(part, pts, false).unwrap();
        assert!(matches!(sp.eval(1.5, 0), Err(Error::ParameterOutOfRange(_))));
        assert!(matches!(sp.eval(-1e-3, 1), Err(Error::ParameterOutOfRange(_))));
        assert!(matches!(sp.eval(0.5, 4), Err(Error::InvalidOrder(4))));
    }

    #[test]
    fn point_count_must_match() {
        let part = Partition::<f64>::uniform(5).unwrap();
        let pts = vec![Vector3::zeros(); 4];
        assert!(matches!(CurveSpline::fit(part, pts, false), Err(Error::PointCountMismatch { expected: 5, got: 4 })));
    }

    #[test]
    fn basis_order_zero_at_knots_is_identity() {
        let part = nonuniform();
        let b = spline_basis_matrix(&part, part.knots(), 0, false).unwrap();
        let id = DMatrix::<f64>::identity(part.len(), part.len());
        assert!((b - id).amax() < 1e-12);
    }

    #[test]
    fn basis_order_one_on_collinear_points_is_parallel() {
        let part = nonuniform();
        let dir = Vector3::new(1.0, -2.0, 0.5);
        let offsets = [0.0, 0.3, 0.9, 1.0, 2.2, 2.3, 4.0];
        let nodes: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0).collect();
        let b = spline_basis_matrix(&part, &nodes, 1, false).unwrap();
        for q in 0..nodes.len() {
            let mut v = Vector3::zeros();
            for (j, o) in offsets.iter().enumerate() {
                v += dir * (o * b[(q, j)]);
            }
            assert!(v.cross(&dir).norm() < 1e-10 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn f32_spline_reproduces_cubic() {
        let part = Partition::<f32>::uniform(6).unwrap();
        let pts = part.knots().iter().map(|&t| Vector3::new(t * t * t, t, 1.0)).collect();
        let sp = CurveSpline::fit(part, pts, false).unwrap();
        let v = sp.eval(0.37f32, 0).unwrap();
        assert!((v.x - 0.37f32.powi(3)).abs() < 1e-5);
    }
}
