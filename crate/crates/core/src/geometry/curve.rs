use nalgebra::Vector3;

use super::partition::Partition;
use super::spline::CurveSpline;
use crate::error::Result;
use crate::scalar::{lit, Real};

/// Position and the first three parameter derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet<T: Real> {
    pub point: Vector3<T>,
    pub d1: Vector3<T>,
    pub d2: Vector3<T>,
    pub d3: Vector3<T>,
}

/// A `C^3` curve parametrized over `[0, 1]`.
pub trait ParametricCurve<T: Real> {
    fn jet(&self, s: T) -> Result<CurveJet<T>>;

    fn point(&self, s: T) -> Result<Vector3<T>> {
        Ok(self.jet(s)?.point)
    }
}

/// Curves with closed-form derivatives, used for oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormCurve<T: Real> {
    /// `center + radius (cos 2 pi s, sin 2 pi s, 0)`.
    Circle {
        center: Vector3<T>,
        radius: T,
    },
    /// `(radius cos w s, radius sin w s, height s)` with `w = 2 pi turns`.
    Helix {
        radius: T,
        turns: T,
        height: T,
    },
    Segment {
        start: Vector3<T>,
        end: Vector3<T>,
    },
}

impl<T: Real> ParametricCurve<T> for ClosedFormCurve<T> {
    fn jet(&self, s: T) -> Result<CurveJet<T>> {
        Ok(match *self {
            ClosedFormCurve::Circle { center, radius } => {
                let w = T::two_pi();
                let (sn, cs) = (w * s).sin_cos();
                let r = radius;
                CurveJet {
                    point: center + Vector3::new(cs, sn, T::zero()) * r,
                    d1: Vector3::new(-sn, cs, T::zero()) * (r * w),
                    d2: Vector3::new(-cs, -sn, T::zero()) * (r * w * w),
                    d3: Vector3::new(sn, -cs, T::zero()) * (r * w * w * w),
                }
            }
            ClosedFormCurve::Helix { radius, turns, height } => {
                let w = T::two_pi() * turns;
                let (sn, cs) = (w * s).sin_cos();
                let r = radius;
                CurveJet {
                    point: Vector3::new(r * cs, r * sn, height * s),
                    d1: Vector3::new(-r * w * sn, r * w * cs, height),
                    d2: Vector3::new(-r * w * w * cs, -r * w * w * sn, T::zero()),
                    d3: Vector3::new(r * w * w * w * sn, -r * w * w * w * cs, T::zero()),
                }
            }
            ClosedFormCurve::Segment { start, end } => CurveJet {
                point: start + (end - start) * s,
                d1: end - start,
                d2: Vector3::zeros(),
                d3: Vector3::zeros(),
            },
        })
    }
}

/// Built-in center curves: the thin torus, the figure-eight-like space curve
/// and the two-turn helix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedCurve {
    Torus,
    Figure,
    Helix,
}

impl NamedCurve {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "torus" => Some(Self::Torus),
            "figure" => Some(Self::Figure),
            "helix" => Some(Self::Helix),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Torus => "torus",
            Self::Figure => "figure",
            Self::Helix => "helix",
        }
    }

    pub fn is_closed(self) -> bool {
        matches!(self, Self::Torus)
    }

    pub fn point<T: Real>(self, s: T) -> Vector3<T> {
        let one = T::one();
        let u = T::two_pi() * s;
        let (sn, cs) = u.sin_cos();
        match self {
            Self::Torus => Vector3::new(cs + one, sn + one, -one),
            Self::Figure => Vector3::new(
                lit::<T>(2.0) * cs / (one + sn * sn),
                lit::<T>(4.0) * cs * sn / (one + lit::<T>(2.0) * sn * sn),
                lit::<T>(4.0) * s * s,
            ),
            Self::Helix => {
                let (sn2, cs2) = (u + u).sin_cos();
                Vector3::new(cs2, sn2, lit::<T>(6.0) * s)
            }
        }
    }

    /// Interpolating spline through `n` equispaced samples; periodic for the torus.
    pub fn spline<T: Real>(self, n: usize) -> Result<CurveSpline<T>> {
        let partition = Partition::uniform(n)?;
        let mut points: Vec<_> = partition.knots().iter().map(|&t| self.point(t)).collect();
        if self.is_closed() {
            points[n - 1] = points[0];
        }
        CurveSpline::fit(partition, points, self.is_closed())
    }

    /// Closed-form equivalent where one exists.
    pub fn closed_form<T: Real>(self) -> Option<ClosedFormCurve<T>> {
        let one = T::one();
        match self {
            Self::Torus => Some(ClosedFormCurve::Circle { center: Vector3::new(one, one, -one), radius: one }),
            Self::Helix => Some(ClosedFormCurve::Helix { radius: one, turns: lit(2.0), height: lit(6.0) }),
            Self::Figure => None,
        }
    }
}

/// Control points of the straight segment from `start` to `end` on an
/// `n`-point uniform partition.
pub fn straight_segment<T: Real>(start: Vector3<T>, end: Vector3<T>, n: usize) -> Result<CurveSpline<T>> {
    let partition = Partition::uniform(n)?;
    let points = partition.knots().iter().map(|&t| start + (end - start) * t).collect();
    CurveSpline::fit(partition, points, false)
}
