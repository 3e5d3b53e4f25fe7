use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{rotation2, Frame, OrthonormalFrameField, Twist};
use crate::scalar::{lit, to_f64, Real};

/// Symmetric 2x2 polarization tensor of a cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolTensor2D<T: Real>(pub Matrix2<T>);

impl<T: Real> PolTensor2D<T> {
    pub fn isotropic(c: T) -> Self {
        Self(Matrix2::identity() * c)
    }

    pub fn diagonal(a: T, b: T) -> Self {
        Self(Matrix2::new(a, T::zero(), T::zero(), b))
    }

    pub fn matrix(&self) -> &Matrix2<T> {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 2] {
        let m = &self.0;
        let half = lit::<T>(0.5);
        let mean = (m[(0, 0)] + m[(1, 1)]) * half;
        let d = (m[(0, 0)] - m[(1, 1)]) * half;
        let off = (m[(0, 1)] + m[(1, 0)]) * half;
        let r = (d * d + off * off).sqrt();
        [mean - r, mean + r]
    }
}

/// Closed form for a disk cross-section: `2 gamma0 / (gamma1 + gamma0) I`.
pub fn disk_tensor<T: Real>(gamma0: T, gamma1: T) -> Result<PolTensor2D<T>> {
    if !(gamma0 > T::zero()) || !(gamma1 > T::zero()) {
        return Err(Error::NonPositiveParameter(format!("gamma0 = {}, gamma1 = {}", to_f64(gamma0), to_f64(gamma1))));
    }
    Ok(PolTensor2D::isotropic(lit::<T>(2.0) * gamma0 / (gamma1 + gamma0)))
}

/// Pointwise 3x3 tensors `M(s_q)` along a curve.
#[derive(Debug, Clone)]
pub struct PolTensor3DField<T: Real> {
    pub nodes: Vec<T>,
    pub matrices: Vec<Matrix3<T>>,
}

/// `diag(1, m)` written in the frame basis and rotated into world coordinates,
/// `M(s) = V(s) diag(1, R_theta m R_theta^T) V(s)^T` with `V = [t n b]`.
pub fn lift_tensor<T: Real>(
    frames: &OrthonormalFrameField<T>,
    m2d: &PolTensor2D<T>,
    twist: Option<&Twist<T>>,
) -> Result<PolTensor3DField<T>> {
    if frames.frames.len() != frames.nodes.len() {
        return Err(Error::NodeMismatch(format!("{} frames for {} nodes", frames.frames.len(), frames.nodes.len())));
    }
    let matrices = frames
        .frames
        .iter()
        .zip(&frames.nodes)
        .map(|(f, &s)| {
            let inplane = match twist {
                Some(tw) => {
                    let r = rotation2(tw.angle(s));
                    r * m2d.0 * r.transpose()
                }
                None => m2d.0,
            };
            lift_at(f, &local_block(&inplane))
        })
        .collect();
    Ok(PolTensor3DField { nodes: frames.nodes.clone(), matrices })
}

/// `diag(1, inplane)` in frame coordinates.
pub fn local_block<T: Real>(inplane: &Matrix2<T>) -> Matrix3<T> {
    let mut m = Matrix3::zeros();
    m[(0, 0)] = T::one();
    m.fixed_view_mut::<2, 2>(1, 1).copy_from(inplane);
    m
}

pub fn lift_at<T: Real>(frame: &Frame<T>, local: &Matrix3<T>) -> Matrix3<T> {
    let v = frame.matrix();
    v * local * v.transpose()
}

/// First-order change of `V M V^T` when the curve is displaced by `h`, with
/// `h_prime = h'(s)`:
/// `V' M V^T + V M V'^T`, where `V'` has columns
/// `((h'.n) n + (h'.b) b, -(h'.n) t, -(h'.b) t) / |p'|`.
pub fn tensor_shape_derivative<T: Real>(
    frame: &Frame<T>,
    speed: T,
    local: &Matrix3<T>,
    h_prime: &Vector3<T>,
) -> Result<Matrix3<T>> {
    if !(speed > T::zero()) {
        return Err(Error::ZeroSpeed(f64::NAN));
    }
    let v = frame.matrix();
    let dv = frame_derivative(frame, speed, h_prime);
    Ok(dv * local * v.transpose() + v * local * dv.transpose())
}

/// `V'_{p,h}` for the given frame.
pub fn frame_derivative<T: Real>(frame: &Frame<T>, speed: T, h_prime: &Vector3<T>) -> Matrix3<T> {
    let hn = h_prime.dot(&frame.normal);
    let hb = h_prime.dot(&frame.binormal);
    let inv = T::one() / speed;
    Matrix3::from_columns(&[
        (frame.normal * hn + frame.binormal * hb) * inv,
        frame.tangent * (-hn * inv),
        frame.tangent * (-hb * inv),
    ])
}

/// `min{1, 1/gamma_r}` and `max{1, 1/gamma_r}`.
pub fn tensor_bounds<T: Real>(gamma_r: T) -> (T, T) {
    let inv = T::one() / gamma_r;
    (inv.min(T::one()), inv.max(T::one()))
}
