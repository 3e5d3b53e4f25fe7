//! Regularized Gauss-Newton reconstruction of the center curve from one
//! far-field pattern.

mod check;
mod distance;
mod frechet;
mod noise;
mod residual;
mod solver;

pub use check::{finite_difference_jacobian, jacobian_error, random_displacement, taylor_remainders, TaylorReport};
pub use distance::{arc_length_samples, relative_curve_distance};
pub use frechet::frechet_t;
pub use noise::add_noise;
pub use residual::{
    assemble_residual, curvature_vector, curvature_vector_derivative, residual_length, BlockLayout, Contributions,
    Problem, ResidualSystem,
};
pub use solver::{
    dominant_block, gauss_newton_step, golden_section_search, reconstruct, reconstruct_with, Block, BlockValues, Event,
    IterationRecord, LineSearch, Reconstruction, SolverConfig,
};
