//! Multi-step forecasts of the uncensored output.
//!
//! Starting from a known origin state (`Var(x_T) = 0`):
//!
//! ```text
//! x_{T+j}        = F x_{T+j-1}
//! y*_{T+j}       = w x_{T+j-1}
//! Var(x_{T+j})   = F Var(x_{T+j-1}) F' + g g' sigma^2
//! Var(y*_{T+j})  = w Var(x_{T+j-1}) w' + sigma^2
//! ```
//!
//! Forecasts are never clipped at a censoring limit. Parameter uncertainty is
//! not included in the variances.

use crate::censored_gaussian::{censored_moments, std_normal_quantile};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::model::InnovationsModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionInterval<T> {
    pub level: T,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult<T> {
    pub horizon: usize,
    pub mean: Vec<T>,
    pub variance: Vec<T>,
    pub intervals: Vec<PredictionInterval<T>>,
    pub origin_state: Vec<T>,
}

impl<T: Scalar> ForecastResult<T> {
    pub fn sd(&self) -> Vec<T> {
        self.variance.iter().map(|v| v.sqrt()).collect()
    }
}

pub fn forecast<T: Scalar>(
    model: &InnovationsModel<T>,
    origin_state: &[T],
    horizon: usize,
    levels: &[T],
) -> Result<ForecastResult<T>> {
    model.check_state(origin_state)?;
    if horizon == 0 {
        return Err(Error::InvalidInput("forecast horizon must be at least 1".into()));
    }
    let mut multipliers = Vec::with_capacity(levels.len());
    for &p in levels {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::InvalidInput(format!("interval level {p} outside (0, 1)")));
        }
        multipliers.push(std_normal_quantile((T::one() + p) * T::lit(0.5))?);
    }

    let n = model.n_states();
    let ft = model.f.transpose();
    let mut x = origin_state.to_vec();
    let mut p: Matrix<T> = Matrix::zeros(n, n);
    let mut mean = Vec::with_capacity(horizon);
    let mut variance = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        mean.push(dot(&model.w, &x));
        variance.push(dot(&p.mul_vec(&model.w), &model.w) + model.sigma2);
        x = model.f.mul_vec(&x);
        p = model.f.mul(&p).mul(&ft);
        p.add_outer(model.sigma2, &model.g, &model.g);
    }

    let intervals = levels
        .iter()
        .zip(multipliers)
        .map(|(&level, k)| {
            let half: Vec<T> = variance.iter().map(|v| k * v.sqrt()).collect();
            PredictionInterval {
                level,
                lower: mean.iter().zip(&half).map(|(m, h)| *m - *h).collect(),
                upper: mean.iter().zip(&half).map(|(m, h)| *m + *h).collect(),
            }
        })
        .collect();

    Ok(ForecastResult {
        horizon,
        mean,
        variance,
        intervals,
        origin_state: origin_state.to_vec(),
    })
}

/// Expected sales `E[min(y*, y_max)]` for a Gaussian demand forecast.
pub fn expected_sales<T: Scalar>(mean: T, sd: T, y_max: T) -> Result<T> {
    censored_moments(mean, sd, y_max).map(|(m, _)| m)
}
