use std::io::Write;

use super::text::fmt;
use crate::error::{Error, Result};
use crate::polarization::PolTensor3DField;
use crate::scalar::{to_f64, Real};

/// One line per node: `s m11 m12 m13 m22 m23 m33`.
pub fn write_tensor_field<T: Real, W: Write>(field: &PolTensor3DField<T>, mut out: W) -> Result<()> {
    if field.nodes.len() != field.matrices.len() {
        return Err(Error::NodeMismatch(format!("{} nodes, {} matrices", field.nodes.len(), field.matrices.len())));
    }
    writeln!(out, "# s m11 m12 m13 m22 m23 m33")?;
    for (s, m) in field.nodes.iter().zip(&field.matrices) {
        let e = |i: usize, j: usize| fmt(to_f64(m[(i, j)]));
        writeln!(out, "{} {} {} {} {} {} {}", fmt(to_f64(*s)), e(0, 0), e(0, 1), e(0, 2), e(1, 1), e(1, 2), e(2, 2))?;
    }
    Ok(())
}
