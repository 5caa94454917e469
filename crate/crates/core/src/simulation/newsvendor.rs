//! Closed-loop newsvendor with lost sales.
//!
//! Each period the forecaster is updated on the sales history, the order-up-to
//! level is set to `F + k sigma` with `k` the standard normal quantile of the
//! target service level, and only `min(demand, order_up_to)` is observed. ETS
//! treats the sales as demand; TETS knows each period's stock level and treats
//! sold-out periods as censored. Both estimate the initial state jointly with
//! the parameters, so the treatment of stock-outs is the only difference.

use std::fmt::Write as _;

use crate::censored_gaussian::std_normal_quantile;
use crate::error::{Error, Result};
use crate::estimation::{fit, FitOptions, FitResult, InitMode, InitPolicy};
use crate::filters::{akf_filter, tobit_filter};
use crate::forecasting::forecast;
use crate::io::fmt_num;
use crate::metrics::EvalReport;
use crate::model::{Family, ModelSpec};
use crate::series::{validate_series, CensoredSeries};

/// Trailing window used by the spiral-down detector.
pub const SPIRAL_WINDOW: usize = 28;
/// The detector fires when the trailing service level drops this far below target.
pub const SPIRAL_MARGIN: f64 = 0.25;

// Refits are warm-started from the previous estimate, so looser stopping
// rules than a cold fit lose nothing measurable and save most of the work.
const REFIT_F_TOL: f64 = 1e-6;
const REFIT_X_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forecaster {
    Ets,
    Tets,
}

impl Forecaster {
    pub fn as_str(self) -> &'static str {
        match self {
            Forecaster::Ets => "ETS",
            Forecaster::Tets => "TETS",
        }
    }
}

impl std::str::FromStr for Forecaster {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ETS" => Ok(Self::Ets),
            "TETS" => Ok(Self::Tets),
            _ => Err(Error::InvalidInput(format!("unknown forecaster `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewsvendorConfig {
    /// True demand.
    pub demand: Vec<f64>,
    pub target_csl: f64,
    /// Periods observed without censoring before the loop starts.
    pub warmup: usize,
    pub forecaster: Forecaster,
    pub spec: ModelSpec,
    /// Parameters are re-estimated every this many loop periods; in between
    /// the filter is re-run with fixed parameters.
    pub refit_every: usize,
    /// Recorded for replay; the loop itself draws no random numbers.
    pub seed: u64,
}

impl NewsvendorConfig {
    pub fn new(demand: Vec<f64>, target_csl: f64, forecaster: Forecaster) -> Self {
        Self {
            demand,
            target_csl,
            warmup: 35,
            forecaster,
            spec: ModelSpec::new(Family::Aaa, Some(7)),
            refit_every: 7,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if !(self.target_csl > 0.5 && self.target_csl < 1.0) {
            return Err(Error::InvalidInput(format!("target CSL {} outside (0.5, 1)", self.target_csl)));
        }
        if self.refit_every == 0 {
            return Err(Error::InvalidInput("refit interval must be positive".into()));
        }
        let needed = self.spec.n_states() + 2;
        if self.warmup < needed {
            return Err(Error::SeriesTooShort {
                needed,
                have: self.warmup,
            });
        }
        if self.demand.len() <= self.warmup {
            return Err(Error::SeriesTooShort {
                needed: self.warmup + 1,
                have: self.demand.len(),
            });
        }
        if self.demand.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite("demand"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodLog {
    pub t: usize,
    pub demand: f64,
    pub forecast: f64,
    pub sigma: f64,
    pub order_up_to: f64,
    pub sales: f64,
    pub censored: bool,
    pub lost: f64,
    pub excess: f64,
    pub refit: bool,
}

#[derive(Debug, Clone)]
pub struct NewsvendorRun {
    pub forecaster: Forecaster,
    pub target_csl: f64,
    /// Loop periods only (warmup excluded).
    pub log: Vec<PeriodLog>,
    pub report: EvalReport<f64>,
    pub spiral_down: bool,
    /// First period at which the detector fired.
    pub spiral_at: Option<usize>,
    /// Refits that failed and kept the previous parameters.
    pub failed_refits: usize,
}

impl NewsvendorRun {
    pub fn log_csv(&self) -> String {
        let mut out = String::from("t,demand,forecast,sigma,order_up_to,sales,censored,lost,excess,refit\n");
        for p in &self.log {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                p.t,
                fmt_num(p.demand),
                fmt_num(p.forecast),
                fmt_num(p.sigma),
                fmt_num(p.order_up_to),
                fmt_num(p.sales),
                p.censored,
                fmt_num(p.lost),
                fmt_num(p.excess),
                p.refit
            );
        }
        out
    }

    pub fn summary_header() -> &'static str {
        "forecaster,target_csl,achieved_csl,lost_sales,excess_stock,rmse,me,n,spiral_down,failed_refits\n"
    }

    pub fn summary_row(&self) -> String {
        let r = &self.report;
        format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            self.forecaster.as_str(),
            fmt_num(self.target_csl),
            fmt_num(r.achieved_csl),
            fmt_num(r.lost_sales),
            fmt_num(r.excess_stock),
            fmt_num(r.rmse),
            fmt_num(r.me),
            r.n,
            self.spiral_down,
            self.failed_refits
        )
    }
}

fn history(config: &NewsvendorConfig, sales: &[f64], bound: &[f64]) -> Result<CensoredSeries<f64>> {
    let s = validate_series(sales, bound)?;
    Ok(match config.forecaster {
        Forecaster::Ets => s.without_bound(),
        Forecaster::Tets => s,
    })
}

/// Filtered state after the last observation with the parameters of `fit` held fixed.
fn update_state(fit: &FitResult<f64>, series: &CensoredSeries<f64>) -> Result<Vec<f64>> {
    if fit.init_mode == InitMode::Diffuse && series.n_censored() == 0 {
        Ok(akf_filter(&fit.model, series)?.final_state)
    } else {
        Ok(tobit_filter(&fit.model, series, &fit.x1)?.final_state().to_vec())
    }
}

/// Runs the loop over `config.demand`.
pub fn run_newsvendor(config: &NewsvendorConfig) -> Result<NewsvendorRun> {
    config.validate()?;
    let k = std_normal_quantile(config.target_csl)?;
    let n = config.demand.len();

    let mut sales: Vec<f64> = config.demand[..config.warmup].to_vec();
    let mut bound: Vec<f64> = vec![f64::INFINITY; config.warmup];
    let mut current: Option<FitResult<f64>> = None;
    let mut failed_refits = 0;
    let mut log = Vec::with_capacity(n - config.warmup);
    let mut spiral_at = None;
    let mut covered_window: std::collections::VecDeque<bool> = std::collections::VecDeque::with_capacity(SPIRAL_WINDOW);

    for t in config.warmup..n {
        let series = history(config, &sales, &bound)?;
        let refit = (t - config.warmup) % config.refit_every == 0;
        let mut state = None;
        if refit || current.is_none() {
            let mut options = FitOptions {
                f_tol: REFIT_F_TOL,
                x_tol: REFIT_X_TOL,
                ..FitOptions::default()
            }
            .with_init(InitPolicy::Deterministic);
            if let Some(prev) = &current {
                options = options.with_start(prev.as_start());
            }
            match fit(&series, config.spec, &options) {
                Ok(f) => {
                    state = Some(f.final_state.clone());
                    current = Some(f);
                }
                Err(e) => {
                    if current.is_none() {
                        return Err(e);
                    }
                    failed_refits += 1;
                }
            }
        }
        let fit = current.as_ref().expect("a fit exists after the first period");
        let state = match state {
            Some(s) => s,
            None => update_state(fit, &series)?,
        };
        let fc = forecast(&fit.model, &state, 1, &[])?;
        let mean = fc.mean[0];
        let sigma = fc.variance[0].sqrt();
        let order_up_to = (mean + k * sigma).max(0.0);

        let demand = config.demand[t];
        let sold = demand.min(order_up_to);
        let censored = demand > order_up_to;
        log.push(PeriodLog {
            t,
            demand,
            forecast: mean,
            sigma,
            order_up_to,
            sales: sold,
            censored,
            lost: (demand - order_up_to).max(0.0),
            excess: (order_up_to - demand).max(0.0),
            refit,
        });
        sales.push(sold);
        bound.push(order_up_to);

        if covered_window.len() == SPIRAL_WINDOW {
            covered_window.pop_front();
        }
        covered_window.push_back(!censored);
        if covered_window.len() == SPIRAL_WINDOW && spiral_at.is_none() {
            let csl = covered_window.iter().filter(|&&c| c).count() as f64 / SPIRAL_WINDOW as f64;
            if csl < config.target_csl - SPIRAL_MARGIN {
                spiral_at = Some(t);
            }
        }
    }

    let forecasts: Vec<f64> = log.iter().map(|p| p.forecast).collect();
    let demand: Vec<f64> = log.iter().map(|p| p.demand).collect();
    let stock: Vec<f64> = log.iter().map(|p| p.order_up_to).collect();
    let report = EvalReport::new(&forecasts, &demand, &stock)?;
    Ok(NewsvendorRun {
        forecaster: config.forecaster,
        target_csl: config.target_csl,
        log,
        report,
        spiral_down: spiral_at.is_some(),
        spiral_at,
        failed_refits,
    })
}
