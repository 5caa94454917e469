use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Gaussian Monte Carlo design.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub n_series: usize,
    /// In-sample length; each generated series has `n_obs + horizon` draws.
    pub n_obs: usize,
    pub mean: f64,
    pub sd: f64,
    /// `+inf` for no censoring. Generation itself never clips.
    pub censor_level: f64,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            n_series: 1000,
            n_obs: 150,
            mean: 100.0,
            sd: 20.0,
            censor_level: f64::INFINITY,
            horizon: 10,
            seed: 20_240_601,
        }
    }
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_series == 0 || self.n_obs == 0 || self.horizon == 0 {
            return Err(Error::InvalidInput("n_series, n_obs and horizon must be positive".into()));
        }
        if !(self.sd > 0.0) || !self.sd.is_finite() || !self.mean.is_finite() {
            return Err(Error::InvalidInput("Gaussian mean must be finite and sd positive".into()));
        }
        if self.censor_level.is_nan() {
            return Err(Error::InvalidInput("censor level is NaN".into()));
        }
        Ok(())
    }
}

/// Generator for replicate `index` of the master `seed`.
pub fn replicate_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `n_series` iid Gaussian series of length `n_obs + horizon`.
pub fn generate_gaussian(config: &MonteCarloConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let normal = Normal::new(config.mean, config.sd).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok((0..config.n_series)
        .map(|i| {
            let mut rng = replicate_rng(config.seed, i);
            (0..config.n_obs + config.horizon).map(|_| normal.sample(&mut rng)).collect()
        })
        .collect())
}
