//! Center-curve geometry: partitions, interpolating splines, frames and
//! tube coordinates.

mod curve;
mod frame;
mod partition;
mod spline;
mod tube;

pub use curve::{straight_segment, ClosedFormCurve, CurveJet, NamedCurve, ParametricCurve};
pub(crate) use frame::frame_field_from_jets;
pub use frame::{
    any_perpendicular, curvature_of, frame_field, pointwise_frame, Frame, OrthonormalFrameField, FRENET_THRESHOLD,
};
pub use partition::Partition;
pub use spline::{spline_basis_matrix, CurveSpline};
pub use tube::{rotation2, TubeCoordinates, Twist};
