use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forward::{weighted_norm, FarFieldGrid};
use crate::scalar::{lit, CVec3, Real};

/// Adds independent uniform complex noise to every sample component.
///
/// Each component gets `c (u1 + i u2) / sqrt(2/3)` with `u1, u2` uniform on
/// `[-1, 1]` and `c = level |E| / sqrt(3 sum w)`, so the expected discrete
/// norm of the noise is `level` times that of the data.
pub fn add_noise<T: Real>(data: &FarFieldGrid<T>, level: f64, seed: u64) -> Result<FarFieldGrid<T>> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::NegativeNoiseLevel(level));
    }
    let samples = data.samples()?;
    if level == 0.0 {
        return Ok(data.clone());
    }
    let norm = crate::scalar::to_f64(weighted_norm(data.weights(), samples));
    let wsum = crate::scalar::to_f64(data.weight_sum());
    let c = level * norm / (3.0 * wsum).sqrt() / (2.0f64 / 3.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy: Vec<CVec3<T>> = samples
        .iter()
        .map(|e| {
            e.map(|v| {
                let u1: f64 = rng.random_range(-1.0..=1.0);
                let u2: f64 = rng.random_range(-1.0..=1.0);
                v + Complex::new(lit::<T>(c * u1), lit::<T>(c * u2))
            })
        })
        .collect();
    data.clone().with_samples(noisy)
}
