//! Trend-seasonal series with a censoring limit that bites late in the sample.
//! Both methods see the clipped in-sample data; the hold-out is scored against
//! the latent values.

use crate::error::{Error, Result};
use crate::estimation::{fit, FitOptions, FitResult, InitPolicy};
use crate::metrics::{me, rmse};
use crate::model::{Family, ModelSpec};
use crate::series::CensoredSeries;

#[derive(Debug, Clone)]
pub struct MethodReport {
    pub forecast: Vec<f64>,
    pub rmse: f64,
    pub bias: f64,
    pub init_mode: crate::estimation::InitMode,
    pub params: Vec<f64>,
    pub sigma: f64,
}

#[derive(Debug, Clone)]
pub struct TrendSeasonalReport {
    pub n_insample: usize,
    pub n_censored: usize,
    pub actual: Vec<f64>,
    pub ets: MethodReport,
    pub tets: MethodReport,
}

impl TrendSeasonalReport {
    /// `step,actual,ets,tets`
    pub fn forecast_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("step,actual,ets,tets\n");
        for j in 0..self.actual.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                j + 1,
                crate::io::fmt_num(self.actual[j]),
                crate::io::fmt_num(self.ets.forecast[j]),
                crate::io::fmt_num(self.tets.forecast[j])
            );
        }
        out
    }
}

fn report(fit: &FitResult<f64>, actual: &[f64]) -> Result<MethodReport> {
    let fc = fit.forecast(actual.len(), &[])?;
    Ok(MethodReport {
        rmse: rmse(&fc.mean, actual)?,
        bias: me(&fc.mean, actual)?,
        forecast: fc.mean,
        init_mode: fit.init_mode,
        params: fit.model.params.to_vec(),
        sigma: fit.sigma(),
    })
}

/// Fits ETS (ignoring the limit) and TETS on `actual[..split]` clipped at `bound`,
/// forecasts the rest and scores both against `actual[split..]`.
pub fn run_trend_seasonal_case(actual: &[f64], bound: &[f64], split: usize, season: usize) -> Result<TrendSeasonalReport> {
    if split == 0 || split >= actual.len() {
        return Err(Error::InvalidInput(format!("split {split} outside 1..{}", actual.len())));
    }
    let tobit = CensoredSeries::from_latent(&actual[..split], &bound[..split.min(bound.len())])?;
    let spec = ModelSpec::new(Family::Aaa, Some(season));
    let holdout = &actual[split..];

    let ets_fit = fit(&tobit.without_bound(), spec, &FitOptions::default().with_init(InitPolicy::Diffuse))?;
    let tets_fit = fit(&tobit, spec, &FitOptions::default().with_init(InitPolicy::Auto))?;
    Ok(TrendSeasonalReport {
        n_insample: split,
        n_censored: tobit.n_censored(),
        actual: holdout.to_vec(),
        ets: report(&ets_fit, holdout)?,
        tets: report(&tets_fit, holdout)?,
    })
}
