//! Orthonormal frames along a curve.
//!
//! Where the curve bends (`|p' x p''| / |p'|^2 > FRENET_THRESHOLD`) the
//! Frenet normal `((p' x p'') x p') / |(p' x p'') x p'|` is used. Elsewhere
//! the frame is carried over from the neighbouring node by double-reflection
//! transport, so straight pieces still get a continuous frame.

use nalgebra::{Matrix3, Vector3};

use super::curve::{CurveJet, ParametricCurve};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Turning-rate threshold below which the Frenet normal is not used.
pub const FRENET_THRESHOLD: f64 = 1e-8;

/// Speeds below `MIN_SPEED * (1 + |p|)` count as vanishing.
pub const MIN_SPEED: f64 = 1e-12;

pub(crate) fn is_regular<T: Real>(jet: &CurveJet<T>) -> bool {
    jet.d1.norm() > lit::<T>(MIN_SPEED) * (T::one() + jet.point.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<T: Real> {
    pub tangent: Vector3<T>,
    pub normal: Vector3<T>,
    pub binormal: Vector3<T>,
}

impl<T: Real> Frame<T> {
    /// `V = [t n b]`.
    pub fn matrix(&self) -> Matrix3<T> {
        Matrix3::from_columns(&[self.tangent, self.normal, self.binormal])
    }

    fn from_tangent_normal(tangent: Vector3<T>, normal: Vector3<T>) -> Self {
        let n = (normal - tangent * tangent.dot(&normal)).normalize();
        Self { tangent, normal: n, binormal: tangent.cross(&n) }
    }
}

#[derive(Debug, Clone)]
pub struct OrthonormalFrameField<T: Real> {
    pub nodes: Vec<T>,
    pub points: Vec<Vector3<T>>,
    pub frames: Vec<Frame<T>>,
    pub curvature: Vec<T>,
    /// Zero where the curvature vanishes.
    pub torsion: Vec<T>,
    pub speed: Vec<T>,
}

impl<T: Real> OrthonormalFrameField<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Some unit vector perpendicular to the unit vector `t`.
pub fn any_perpendicular<T: Real>(t: &Vector3<T>) -> Vector3<T> {
    let ax = [t.x.abs(), t.y.abs(), t.z.abs()];
    let axis = if ax[0] <= ax[1] && ax[0] <= ax[2] {
        Vector3::x()
    } else if ax[1] <= ax[2] {
        Vector3::y()
    } else {
        Vector3::z()
    };
    (axis - t * t.dot(&axis)).normalize()
}

pub(crate) fn bends<T: Real>(jet: &CurveJet<T>) -> bool {
    let c = jet.d1.cross(&jet.d2).norm();
    c > lit::<T>(FRENET_THRESHOLD) * jet.d1.norm_squared()
}

fn frenet<T: Real>(jet: &CurveJet<T>) -> Frame<T> {
    let t = jet.d1.normalize();
    let n = jet.d1.cross(&jet.d2).cross(&jet.d1);
    Frame::from_tangent_normal(t, n)
}

/// Frame at a single parameter value: Frenet where defined, otherwise a
/// deterministic perpendicular completion.
pub fn pointwise_frame<T: Real>(jet: &CurveJet<T>) -> Frame<T> {
    if bends(jet) {
        frenet(jet)
    } else {
        let t = jet.d1.normalize();
        Frame::from_tangent_normal(t, any_perpendicular(&t))
    }
}

/// Double-reflection transport of `normal` from `(x0, t0)` to `(x1, t1)`.
fn transport<T: Real>(
    x0: &Vector3<T>,
    t0: &Vector3<T>,
    normal: &Vector3<T>,
    x1: &Vector3<T>,
    t1: &Vector3<T>,
) -> Vector3<T> {
    let two = lit::<T>(2.0);
    let tiny = T::default_epsilon() * T::default_epsilon();
    let v1 = x1 - x0;
    let c1 = v1.norm_squared();
    let (r_l, t_l) = if c1 > tiny {
        (normal - v1 * (two / c1 * v1.dot(normal)), t0 - v1 * (two / c1 * v1.dot(t0)))
    } else {
        (*normal, *t0)
    };
    let v2 = t1 - t_l;
    let c2 = v2.norm_squared();
    if c2 > tiny {
        r_l - v2 * (two / c2 * v2.dot(&r_l))
    } else {
        r_l
    }
}

pub fn curvature_of<T: Real>(jet: &CurveJet<T>) -> T {
    let sp = jet.d1.norm();
    jet.d1.cross(&jet.d2).norm() / (sp * sp * sp)
}

/// Frames, curvature and torsion of `curve` at `nodes` (assumed increasing).
pub fn frame_field<T: Real, C: ParametricCurve<T> + ?Sized>(
    curve: &C,
    nodes: &[T],
) -> Result<OrthonormalFrameField<T>> {
    let jets = nodes.iter().map(|&s| curve.jet(s)).collect::<Result<Vec<_>>>()?;
    frame_field_from_jets(nodes, &jets)
}

pub(crate) fn frame_field_from_jets<T: Real>(nodes: &[T], jets: &[CurveJet<T>]) -> Result<OrthonormalFrameField<T>> {
    for (s, j) in nodes.iter().zip(jets) {
        if !is_regular(j) {
            return Err(Error::ZeroSpeed(to_f64(*s)));
        }
    }
    let q = jets.len();
    let tangents: Vec<_> = jets.iter().map(|j| j.d1.normalize()).collect();
    let bending: Vec<bool> = jets.iter().map(bends).collect();
    let mut frames: Vec<Option<Frame<T>>> = vec![None; q];

    let seed = bending.iter().position(|&b| b);
    match seed {
        Some(f) => frames[f] = Some(frenet(&jets[f])),
        None if q > 0 => frames[0] = Some(Frame::from_tangent_normal(tangents[0], any_perpendicular(&tangents[0]))),
        None => {}
    }
    let start = seed.unwrap_or(0);
    for i in (0..start).rev() {
        let next = frames[i + 1].unwrap();
        let r = transport(&jets[i + 1].point, &tangents[i + 1], &next.normal, &jets[i].point, &tangents[i]);
        frames[i] = Some(Frame::from_tangent_normal(tangents[i], r));
    }
    for i in start + 1..q {
        frames[i] = Some(if bending[i] {
            frenet(&jets[i])
        } else {
            let prev = frames[i - 1].unwrap();
            let r = transport(&jets[i - 1].point, &tangents[i - 1], &prev.normal, &jets[i].point, &tangents[i]);
            Frame::from_tangent_normal(tangents[i], r)
        });
    }

    let curvature = jets.iter().map(curvature_of).collect();
    let torsion = jets
        .iter()
        .zip(&bending)
        .map(|(j, &b)| {
            if b {
                let c = j.d1.cross(&j.d2);
                c.dot(&j.d3) / c.norm_squared()
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(OrthonormalFrameField {
        nodes: nodes.to_vec(),
        points: jets.iter().map(|j| j.point).collect(),
        frames: frames.into_iter().map(Option::unwrap).collect(),
        curvature,
        torsion,
        speed: jets.iter().map(|j| j.d1.norm()).collect(),
    })
}
