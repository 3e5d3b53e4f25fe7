use crate::error::{Error, Result};
use crate::geometry::Partition;
use crate::scalar::{lit, Real};

/// Composite Simpson rule with `M = 2m + 1` equispaced nodes on each spline
/// segment. Nodes shared by neighbouring segments are stored once, so there
/// are `(M - 1)(n - 1) + 1` nodes in total.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    per_segment: usize,
    /// Simpson weights of one segment, relative to its width.
    local: Vec<T>,
    widths: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn simpson(partition: &Partition<T>, per_segment: usize) -> Result<Self> {
        if per_segment < 3 || per_segment.is_multiple_of(2) {
            return Err(Error::InvalidQuadrature(format!("M = {per_segment} must be odd and at least 3")));
        }
        let intervals = per_segment - 1;
        let local: Vec<T> = (0..per_segment)
            .map(|k| {
                let c = if k == 0 || k == intervals {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                lit::<T>(c / (3.0 * intervals as f64))
            })
            .collect();
        let segments = partition.segments();
        let total = intervals * segments + 1;
        let mut nodes = Vec::with_capacity(total);
        let mut weights = vec![T::zero(); total];
        let knots = partition.knots();
        let mut widths = Vec::with_capacity(segments);
        for i in 0..segments {
            let h = partition.width(i);
            widths.push(h);
            for k in 0..per_segment {
                let idx = i * intervals + k;
                if k > 0 || i == 0 {
                    let s = if k == intervals {
                        knots[i + 1]
                    } else {
                        knots[i] + h * lit::<T>(k as f64 / intervals as f64)
                    };
                    nodes.push(s);
                }
                weights[idx] += h * local[k];
            }
        }
        Ok(Self { nodes, weights, per_segment, local, widths })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `M`.
    pub fn per_segment(&self) -> usize {
        self.per_segment
    }

    pub fn segments(&self) -> usize {
        self.widths.len()
    }

    /// `(node index, weight)` of the rule restricted to segment `i`.
    pub fn segment_rule(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let start = i * (self.per_segment - 1);
        let h = self.widths[i];
        self.local.iter().enumerate().map(move |(k, w)| (start + k, h * *w))
    }

    /// Approximates `int_0^1 f`, given `f` at the nodes.
    pub fn integrate(&self, values: &[T]) -> T {
        self.weights.iter().zip(values).fold(T::zero(), |a, (w, v)| a + *w * *v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_weight_sum() {
        let p = Partition::<f64>::uniform(30).unwrap();
        let q = QuadratureRule::simpson(&p, 11).unwrap();
        assert_eq!(q.len(), 10 * 29 + 1);
        let sum: f64 = q.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
        assert_eq!(q.nodes()[0], 0.0);
        assert_eq!(*q.nodes().last().unwrap(), 1.0);
        assert!(q.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_for_cubics_on_uneven_partition() {
        let p = Partition::new(vec![0.0, 0.1, 0.45, 0.5, 1.0]).unwrap();
        let q = QuadratureRule::simpson(&p, 5).unwrap();
        let vals: Vec<f64> = q.nodes().iter().map(|s| 4.0 * s * s * s - s + 2.0).collect();
        assert!((q.integrate(&vals) - 2.5).abs() < 1e-14);
        let seg: f64 = q.segment_rule(1).map(|(i, w)| w * vals[i]).sum();
        let exact = |s: f64| s.powi(4) - s * s / 2.0 + 2.0 * s;
        assert!((seg - (exact(0.45) - exact(0.1))).abs() < 1e-14);
    }

    #[test]
    fn rejects_even_or_small_m() {
        let p = Partition::<f64>::uniform(5).unwrap();
        assert!(QuadratureRule::simpson(&p, 4).is_err());
        assert!(QuadratureRule::simpson(&p, 1).is_err());
    }
}
