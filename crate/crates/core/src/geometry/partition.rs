use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Strictly increasing knot sequence `0 = t_1 < ... < t_n = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    knots: Vec<T>,
}

impl<T: Real> Partition<T> {
    pub fn new(knots: Vec<T>) -> Result<Self> {
        if knots.len() < 4 {
            return Err(Error::TooFewPoints(knots.len()));
        }
        if knots[0] != T::zero() || knots[knots.len() - 1] != T::one() {
            return Err(Error::InvalidPartition(format!(
                "endpoints must be exactly 0 and 1, got {} and {}",
                to_f64(knots[0]),
                to_f64(knots[knots.len() - 1])
            )));
        }
        if let Some(w) = knots.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPartition(format!(
                "knots not strictly increasing at {} -> {}",
                to_f64(w[0]),
                to_f64(w[1])
            )));
        }
        Ok(Self { knots })
    }

    /// `n` equispaced knots.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::TooFewPoints(n));
        }
        let last = lit::<T>((n - 1) as f64);
        let mut knots: Vec<T> = (0..n).map(|i| lit::<T>(i as f64) / last).collect();
        knots[n - 1] = T::one();
        Self::new(knots)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn width(&self, segment: usize) -> T {
        self.knots[segment + 1] - self.knots[segment]
    }

    /// Segment index `i` with `t_i < s <= t_{i+1}`; `s = 0` maps to the first segment.
    pub fn locate(&self, s: T) -> usize {
        let below = self.knots.partition_point(|&t| t < s);
        below.saturating_sub(1).min(self.segments() - 1)
    }

    /// Checks `s` against `[0, 1]`.
    pub fn check_parameter(&self, s: T) -> Result<()> {
        if s >= T::zero() && s <= T::one() {
            Ok(())
        } else {
            Err(Error::ParameterOutOfRange(to_f64(s)))
        }
    }
}
