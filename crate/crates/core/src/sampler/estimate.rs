use crate::error::{Error, Result};
use crate::math;

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 32;

/// A Monte Carlo mean with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Estimate {
    /// Mean of all samples; the standard error comes from `BATCHES`
    /// consecutive batches of `n / BATCHES` samples (a remainder at the end
    /// is left out of the batches but kept in the mean).
    pub fn batch_means(samples: &[f64], seed: u64) -> Result<Estimate> {
        let n = samples.len();
        if n < BATCHES {
            return Err(Error::TooFewSamples {
                samples: n,
                batches: BATCHES,
            });
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let b = n / BATCHES;
        let batch_means: [f64; BATCHES] =
            core::array::from_fn(|k| samples[k * b..(k + 1) * b].iter().sum::<f64>() / b as f64);
        let bm = batch_means.iter().sum::<f64>() / BATCHES as f64;
        let var = batch_means.iter().map(|x| (x - bm) * (x - bm)).sum::<f64>() / (BATCHES - 1) as f64;
        Ok(Estimate {
            mean,
            stderr: math::sqrt(var / BATCHES as f64),
            n_samples: n,
            seed,
        })
    }

    /// `sqrt(a.stderr^2 + b.stderr^2)`.
    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        math::sqrt(self.stderr * self.stderr + other.stderr * other.stderr)
    }

    /// Difference in units of the combined standard error (infinite when both
    /// errors vanish and the means differ).
    pub fn z_gap(&self, other: &Estimate) -> f64 {
        let d = self.mean - other.mean;
        let s = self.combined_stderr(other);
        if s > 0.0 {
            d / s
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }
}
