//! Gaussian demand censored at a constant level: plain ETS(A,N,N) fitted to the
//! clipped data as if it were uncensored, against the Tobit fit that knows the
//! limit. Forecasts are scored against the uncensored future.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::generate::{generate_gaussian, MonteCarloConfig};
use crate::error::Result;
use crate::estimation::{fit, FitOptions, InitPolicy};
use crate::io::fmt_num;
use crate::metrics::{me, rmse};
use crate::model::{Family, ModelSpec};
use crate::series::CensoredSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ets,
    Tets,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ets => "ETS",
            Method::Tets => "TETS",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table1Config {
    /// Design; its `censor_level` is ignored in favour of `levels`.
    pub base: MonteCarloConfig,
    pub levels: Vec<f64>,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            base: MonteCarloConfig::default(),
            levels: vec![f64::INFINITY, 120.0, 100.0, 90.0],
        }
    }
}

/// One replicate, one method, one censoring level.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub censor_level: f64,
    pub method: Method,
    pub rmse: f64,
    pub bias: f64,
    /// Estimated innovation sd minus the true one.
    pub sd_bias: f64,
    pub censored_fraction: f64,
    pub converged: bool,
}

/// Averages over replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub censor_level: f64,
    pub method: Method,
    pub rmse: f64,
    pub bias: f64,
    pub sd_bias: f64,
    pub censored_fraction: f64,
    /// Replicates that produced a fit.
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct Table1 {
    pub records: Vec<ReplicateRecord>,
    pub summary: Vec<Table1Row>,
}

impl Table1 {
    pub fn row(&self, censor_level: f64, method: Method) -> Option<&Table1Row> {
        self.summary
            .iter()
            .find(|r| r.method == method && (r.censor_level == censor_level))
    }

    pub fn records_csv(&self) -> String {
        let mut out = String::from("replicate,censor_level,method,rmse,bias,sd_bias,censored_fraction,converged\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.replicate,
                fmt_num(r.censor_level),
                r.method.as_str(),
                fmt_num(r.rmse),
                fmt_num(r.bias),
                fmt_num(r.sd_bias),
                fmt_num(r.censored_fraction),
                r.converged
            );
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("censor_level,method,rmse,bias,sd_bias,censored_fraction,n\n");
        for r in &self.summary {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_num(r.censor_level),
                r.method.as_str(),
                fmt_num(r.rmse),
                fmt_num(r.bias),
                fmt_num(r.sd_bias),
                fmt_num(r.censored_fraction),
                r.n
            );
        }
        out
    }
}

fn score(
    replicate: usize,
    level: f64,
    method: Method,
    series: &CensoredSeries<f64>,
    policy: InitPolicy,
    future: &[f64],
    true_sd: f64,
    censored_fraction: f64,
) -> ReplicateRecord {
    let spec = ModelSpec::new(Family::Ann, None);
    let options = FitOptions::default().with_init(policy);
    let scored = fit(series, spec, &options).and_then(|f| {
        let fc = f.forecast(future.len(), &[])?;
        Ok((rmse(&fc.mean, future)?, me(&fc.mean, future)?, f.sigma() - true_sd, f.converged))
    });
    let (rmse, bias, sd_bias, converged) = scored.unwrap_or((f64::NAN, f64::NAN, f64::NAN, false));
    ReplicateRecord {
        replicate,
        censor_level: level,
        method,
        rmse,
        bias,
        sd_bias,
        censored_fraction,
        converged,
    }
}

fn replicate(index: usize, draws: &[f64], config: &Table1Config) -> Result<Vec<ReplicateRecord>> {
    let n = config.base.n_obs;
    let (insample, future) = draws.split_at(n);
    let mut out = Vec::with_capacity(2 * config.levels.len());
    for &level in &config.levels {
        let bound = vec![level; n];
        let tobit = CensoredSeries::from_latent(insample, &bound)?;
        let frac = tobit.n_censored() as f64 / n as f64;
        let plain = tobit.without_bound();
        out.push(score(index, level, Method::Ets, &plain, InitPolicy::Diffuse, future, config.base.sd, frac));
        out.push(score(index, level, Method::Tets, &tobit, InitPolicy::Auto, future, config.base.sd, frac));
    }
    Ok(out)
}

/// Runs every replicate at every censoring level for both methods.
pub fn run_table1(config: &Table1Config) -> Result<Table1> {
    let draws = generate_gaussian(&config.base)?;
    let per_replicate: Vec<Result<Vec<ReplicateRecord>>> = draws
        .par_iter()
        .enumerate()
        .map(|(i, d)| replicate(i, d, config))
        .collect();
    let mut records = Vec::with_capacity(draws.len() * config.levels.len() * 2);
    for r in per_replicate {
        records.extend(r?);
    }

    let mut summary = Vec::new();
    for &level in &config.levels {
        for method in [Method::Ets, Method::Tets] {
            let rows: Vec<&ReplicateRecord> = records
                .iter()
                .filter(|r| r.censor_level == level && r.method == method && r.rmse.is_finite())
                .collect();
            let n = rows.len();
            let avg = |f: fn(&ReplicateRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n as f64;
            summary.push(Table1Row {
                censor_level: level,
                method,
                rmse: avg(|r| r.rmse),
                bias: avg(|r| r.bias),
                sd_bias: avg(|r| r.sd_bias),
                censored_fraction: avg(|r| r.censored_fraction),
                n,
            });
        }
    }
    Ok(Table1 { records, summary })
}
