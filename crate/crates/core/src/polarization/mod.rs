//! Cross-section polarization tensors and their three-dimensional lift
//! along the center curve.

mod material;
mod oracle;
mod tensor;

pub use material::Material;
pub use oracle::{numeric_cross_section_tensor, OracleOptions};
pub use tensor::{
    disk_tensor, frame_derivative, lift_at, lift_tensor, local_block, tensor_bounds, tensor_shape_derivative,
    PolTensor2D, PolTensor3DField,
};
