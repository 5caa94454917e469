//! Synthetic data sets bundled with the crate.
//!
//! * A monthly log-passenger-like series (1949-01 .. 1960-12) with trend and
//!   yearly seasonality, and a censoring limit fixed at 5.6 until 1956 that then
//!   rises linearly.
//! * A daily demand series (one year) with a weekly cycle, slowly wandering
//!   level and Gaussian noise, standing in for a retail SKU aggregate.
//!
//! `trend_seasonal_observed.csv` holds the clipped values, i.e. what a
//! forecaster would actually record.
//!
//! The generators are the source of truth; the CSV copies under `fixtures/`
//! are what the CLI reads and are checked against the generators in tests.

use rand_distr::{Distribution, Normal};

use super::generate::replicate_rng;
use crate::error::Result;
use crate::io::{read_series_csv, SeriesFile};

pub const TREND_SEASONAL_CSV: &str = include_str!("../../fixtures/trend_seasonal.csv");
pub const TREND_SEASONAL_OBSERVED_CSV: &str = include_str!("../../fixtures/trend_seasonal_observed.csv");
pub const M5_LIKE_CSV: &str = include_str!("../../fixtures/m5_like.csv");

/// In-sample length of the trend-seasonal fixture (ten years of months).
pub const TREND_SEASONAL_SPLIT: usize = 120;
pub const TREND_SEASONAL_SEASON: usize = 12;
pub const M5_SEASON: usize = 7;
pub const M5_LIKE_SEED: u64 = 0;

const MONTH_PATTERN: [f64; 12] = [
    -0.09, -0.11, 0.02, -0.01, -0.01, 0.11, 0.22, 0.21, 0.07, -0.07, -0.21, -0.09,
];

const WEEK_PATTERN: [f64; 7] = [1.00, 0.90, 0.86, 0.88, 0.98, 1.22, 1.16];

/// Latent log-passenger series and its censoring limit.
pub fn trend_seasonal_fixture() -> SeriesFile {
    let n = 144;
    let mut rng = replicate_rng(0x7e75_a1e5, 0);
    let level_noise = Normal::new(0.0, 0.008).expect("valid sd");
    let obs_noise = Normal::new(0.0, 0.02).expect("valid sd");
    let centre = MONTH_PATTERN.iter().sum::<f64>() / 12.0;

    let mut drift = 0.0;
    let mut values = Vec::with_capacity(n);
    let mut bound = Vec::with_capacity(n);
    let mut timestamps = Vec::with_capacity(n);
    for t in 0..n {
        drift += level_noise.sample(&mut rng);
        let y = 4.72 + 0.010 * t as f64 + drift + (MONTH_PATTERN[t % 12] - centre) + obs_noise.sample(&mut rng);
        values.push(round6(y));
        let limit = if t < 84 { 5.6 } else { 5.6 + 0.006 * (t - 84) as f64 };
        bound.push(round6(limit));
        timestamps.push(format!("{}-{:02}", 1949 + t / 12, t % 12 + 1));
    }
    SeriesFile {
        timestamps,
        values,
        bound,
        has_bound: true,
    }
}

/// The same series as seen by the forecaster: values clipped at the limit.
pub fn trend_seasonal_observed_fixture() -> SeriesFile {
    let mut f = trend_seasonal_fixture();
    for (v, b) in f.values.iter_mut().zip(&f.bound) {
        *v = v.min(*b);
    }
    f
}

/// One year of daily demand with a weekly cycle. `seed` selects the realization.
pub fn m5_like_demand(seed: u64) -> Vec<f64> {
    let n = 365;
    let mut rng = replicate_rng(0x5eed_0005, seed as usize);
    let level_step = Normal::new(0.0, 1.5).expect("valid sd");
    let noise = Normal::new(0.0, 1.0).expect("valid sd");
    let mut level = 300.0;
    (0..n)
        .map(|t| {
            level += level_step.sample(&mut rng);
            let mean = level * WEEK_PATTERN[t % 7];
            let d = mean + 0.16 * mean * noise.sample(&mut rng);
            d.max(0.0).round()
        })
        .collect()
}

/// The bundled M5-like series as a [`SeriesFile`].
pub fn m5_like_fixture() -> SeriesFile {
    let values = m5_like_demand(M5_LIKE_SEED);
    SeriesFile {
        timestamps: (1..=values.len()).map(|d| format!("d_{d}")).collect(),
        bound: vec![f64::INFINITY; values.len()],
        values,
        has_bound: false,
    }
}

pub fn bundled_trend_seasonal() -> Result<SeriesFile> {
    read_series_csv(TREND_SEASONAL_CSV)
}

pub fn bundled_trend_seasonal_observed() -> Result<SeriesFile> {
    read_series_csv(TREND_SEASONAL_OBSERVED_CSV)
}

pub fn bundled_m5_like() -> Result<SeriesFile> {
    read_series_csv(M5_LIKE_CSV)
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}
