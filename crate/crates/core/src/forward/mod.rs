//! Leading-order forward model: incident waves, sphere grids, quadrature
//! and far/near-field evaluation for a thin tube with circular
//! cross-section.

mod field;
mod grid;
mod quadrature;
mod wave;

pub(crate) use field::FarFieldKernel;
pub use field::{
    far_field, far_field_from_samples, far_field_grid, green_tensor, near_field, CurveSamples, MIN_OBSERVATION_DISTANCE,
};
pub(crate) use grid::weighted_norm;
pub use grid::{sphere_norm, FarFieldGrid};
pub use quadrature::QuadratureRule;
pub use wave::PlaneWave;
