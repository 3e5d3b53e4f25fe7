//! Plain-text readers and writers. Reals are written with 17 significant
//! digits so that files round-trip exactly.

mod config;
mod curve;
mod farfield;
mod log;
mod series;
mod tensor;
mod text;

pub use config::{InitialGuess, MaterialConfig, RunConfig, WaveConfig};
pub use curve::{read_curve, write_curve};
pub use farfield::{grid_to_f64, read_far_field, write_far_field, FarFieldHeader};
pub use log::{read_iteration_log, write_iteration_log, write_record};
pub use series::{export_convergence_series, rel_diff, PlotSeries};
pub use tensor::write_tensor_field;
