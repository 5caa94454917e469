//! Maximum-likelihood estimation and information-criterion model selection.
//!
//! Two paths, chosen by [`InitPolicy`]:
//!
//! * **Diffuse**: no observation sits on its limit. Smoothing parameters maximize
//!   the augmented-filter likelihood with `sigma^2` concentrated out and the
//!   initial state estimated from the whole sample.
//! * **Deterministic**: at least one observation is censored. The initial state
//!   is a free parameter and the Tobit likelihood is maximized jointly over the
//!   smoothing parameters, `ln sigma` and the initial state.
//!
//! Smoothing parameters live in `[0, 1]` and are optimized through a logistic
//! transform; parameters within [`BOUNDARY_TOL`] of a bound are reported in
//! [`FitResult::at_boundary`].

mod start;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{akf_objective, tobit_filter, tobit_objective};
use crate::forecasting::{forecast, ForecastResult};
use crate::model::{InnovationsModel, ModelSpec, SmoothingParams};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::scalar::Scalar;
use crate::series::CensoredSeries;

pub use start::{default_sigma_start, heuristic_initial_state};

/// Distance from 0 or 1 at which a smoothing parameter counts as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-3;

pub const DEFAULT_ALPHA: f64 = 0.3;
pub const DEFAULT_BETA: f64 = 0.05;
pub const DEFAULT_GAMMA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitMode {
    Diffuse,
    Deterministic,
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::Diffuse => "diffuse",
            InitMode::Deterministic => "deterministic",
        })
    }
}

/// How the initial state is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InitPolicy {
    /// Deterministic when any observation is censored, diffuse otherwise.
    #[default]
    Auto,
    Diffuse,
    Deterministic,
}

impl FromStr for InitPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "diffuse" => Ok(Self::Diffuse),
            "deterministic" => Ok(Self::Deterministic),
            _ => Err(Error::InvalidInput(format!("unknown init policy `{s}`"))),
        }
    }
}

impl fmt::Display for InitPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitPolicy::Auto => "auto",
            InitPolicy::Diffuse => "diffuse",
            InitPolicy::Deterministic => "deterministic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Criterion {
    #[default]
    Aic,
    Bic,
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Self::Aic),
            "bic" => Ok(Self::Bic),
            _ => Err(Error::InvalidInput(format!("unknown criterion `{s}`"))),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Aic => "aic",
            Criterion::Bic => "bic",
        })
    }
}

/// Optional user-supplied starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct StartValues<T> {
    pub params: SmoothingParams<T>,
    pub sigma: Option<T>,
    /// Full initial state; only used on the deterministic path.
    pub x1: Option<Vec<T>>,
}

#[derive(Debug, Clone)]
pub struct FitOptions<T> {
    pub init: InitPolicy,
    pub max_evals: usize,
    pub f_tol: T,
    pub x_tol: T,
    pub start: Option<StartValues<T>>,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            init: InitPolicy::Auto,
            max_evals: 50_000,
            f_tol: T::lit(1e-8),
            x_tol: T::lit(1e-6),
            start: None,
        }
    }
}

impl<T: Scalar> FitOptions<T> {
    pub fn with_init(mut self, init: InitPolicy) -> Self {
        self.init = init;
        self
    }

    pub fn with_start(mut self, start: StartValues<T>) -> Self {
        self.start = Some(start);
        self
    }
}

/// Estimated model plus diagnostics.
#[derive(Debug, Clone)]
pub struct FitResult<T> {
    /// Model at the estimated parameters and `sigma^2`.
    pub model: InnovationsModel<T>,
    /// Estimated initial state (predicts the first observation).
    pub x1: Vec<T>,
    /// Filtered state after the last observation; the forecast origin.
    pub final_state: Vec<T>,
    pub loglik: T,
    pub n_params: usize,
    pub n_obs: usize,
    pub n_censored: usize,
    pub aic: T,
    pub bic: T,
    pub init_mode: InitMode,
    pub converged: bool,
    pub n_evals: usize,
    pub at_boundary: Vec<String>,
    /// Best negative log-likelihood after each optimizer iteration.
    pub trace: Vec<T>,
}

impl<T: Scalar> FitResult<T> {
    pub fn criterion(&self, c: Criterion) -> T {
        match c {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
        }
    }

    pub fn forecast(&self, horizon: usize, levels: &[T]) -> Result<ForecastResult<T>> {
        forecast(&self.model, &self.final_state, horizon, levels)
    }

    pub fn sigma(&self) -> T {
        self.model.sigma()
    }

    /// Start values reproducing this fit, for warm-starting a refit on more data.
    pub fn as_start(&self) -> StartValues<T> {
        StartValues {
            params: self.model.params,
            sigma: Some(self.model.sigma()),
            x1: Some(self.x1.clone()),
        }
    }
}

fn logistic<T: Scalar>(v: T) -> T {
    T::one() / (T::one() + (-v).exp())
}

fn logit<T: Scalar>(p: T) -> T {
    let eps = T::lit(1e-9);
    let p = p.max(eps).min(T::one() - eps);
    (p / (T::one() - p)).ln()
}

fn information_criteria<T: Scalar>(loglik: T, k: usize, n: usize) -> (T, T) {
    let kf = T::from_usize_lossy(k);
    let nf = T::from_usize_lossy(n);
    let m2 = -T::lit(2.0) * loglik;
    (m2 + T::lit(2.0) * kf, m2 + nf.ln() * kf)
}

fn boundary_flags<T: Scalar>(spec: &ModelSpec, params: &SmoothingParams<T>) -> Vec<String> {
    let tol = T::lit(BOUNDARY_TOL);
    spec.param_names()
        .iter()
        .zip(params.to_vec())
        .filter(|(_, v)| *v < tol || *v > T::one() - tol)
        .map(|(name, _)| name.to_string())
        .collect()
}

fn start_params<T: Scalar>(spec: &ModelSpec, options: &FitOptions<T>) -> Vec<T> {
    match &options.start {
        Some(s) => s.params.to_vec(),
        None => [DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_GAMMA][..spec.family.n_smoothing()]
            .iter()
            .map(|&v| T::lit(v))
            .collect(),
    }
}

/// Fits one model to `series` by maximum likelihood.
pub fn fit<T: Scalar>(series: &CensoredSeries<T>, spec: ModelSpec, options: &FitOptions<T>) -> Result<FitResult<T>> {
    spec.validate()?;
    let needed = spec.n_states() + 2;
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            have: series.len(),
        });
    }
    let mode = match options.init {
        InitPolicy::Auto if series.n_censored() > 0 => InitMode::Deterministic,
        InitPolicy::Auto | InitPolicy::Diffuse => InitMode::Diffuse,
        InitPolicy::Deterministic => InitMode::Deterministic,
    };
    match mode {
        InitMode::Diffuse => fit_diffuse(series, spec, options),
        InitMode::Deterministic => fit_deterministic(series, spec, options),
    }
}

fn nm_options<T: Scalar>(dim: usize, options: &FitOptions<T>) -> NelderMeadOptions<T> {
    let mut nm = NelderMeadOptions::new(dim);
    nm.max_evals = options.max_evals;
    nm.f_tol = options.f_tol;
    nm.x_tol = options.x_tol;
    nm
}

fn fit_diffuse<T: Scalar>(series: &CensoredSeries<T>, spec: ModelSpec, options: &FitOptions<T>) -> Result<FitResult<T>> {
    let k = spec.family.n_smoothing();
    let values = series.values();
    let template = InnovationsModel::new(spec, SmoothingParams::from_slice(spec.family, &start_params(&spec, options))?, T::one())?;

    let decode = |theta: &[T]| -> Result<SmoothingParams<T>> {
        let p: Vec<T> = theta.iter().map(|&v| logistic(v)).collect();
        SmoothingParams::from_slice(spec.family, &p)
    };
    let objective = |theta: &[T]| -> T {
        decode(theta)
            .and_then(|p| template.with_params(p, T::one()))
            .and_then(|m| akf_objective(&m, values))
            .map(|(ll, ..)| -ll)
            .unwrap_or(T::infinity())
    };

    let theta0: Vec<T> = start_params(&spec, options).into_iter().map(logit).collect();
    let nm = nm_options(k, options);
    let res = nelder_mead(objective, &theta0, &nm);
    if !res.f.is_finite() {
        return Err(Error::Singular(format!("diffuse likelihood not finite for {spec}")));
    }

    let params = decode(&res.x)?;
    let (loglik, sigma2, x1, final_state) = akf_objective(&template.with_params(params, T::one())?, values)?;
    let model = template.with_params(params, sigma2)?;
    let n_params = k + 1;
    let (aic, bic) = information_criteria(loglik, n_params, series.len());
    Ok(FitResult {
        at_boundary: boundary_flags(&spec, &params),
        model,
        x1,
        final_state,
        loglik,
        n_params,
        n_obs: series.len(),
        n_censored: series.n_censored(),
        aic,
        bic,
        init_mode: InitMode::Diffuse,
        converged: res.converged,
        n_evals: res.n_evals,
        trace: res.trace,
    })
}

fn fit_deterministic<T: Scalar>(
    series: &CensoredSeries<T>,
    spec: ModelSpec,
    options: &FitOptions<T>,
) -> Result<FitResult<T>> {
    let k = spec.family.n_smoothing();
    let basis = spec.init_basis::<T>();
    let q = basis.cols();

    let sigma0 = options
        .start
        .as_ref()
        .and_then(|s| s.sigma)
        .unwrap_or_else(|| default_sigma_start(series));
    let x_start = match options.start.as_ref().and_then(|s| s.x1.clone()) {
        Some(x) if x.len() == spec.n_states() => x,
        _ => heuristic_initial_state(series, &spec),
    };
    let delta0: Vec<T> = x_start[..q].to_vec();
    // free initial-state coordinates are optimized in units of sigma0 (trend in tenths)
    let scales: Vec<T> = (0..q)
        .map(|i| if i == 1 && spec.family != crate::Family::Ann { sigma0 * T::lit(0.1) } else { sigma0 })
        .collect();

    let template = InnovationsModel::new(spec, SmoothingParams::from_slice(spec.family, &start_params(&spec, options))?, T::one())?;

    let decode = |theta: &[T]| -> Result<(InnovationsModel<T>, Vec<T>)> {
        let p: Vec<T> = theta[..k].iter().map(|&v| logistic(v)).collect();
        let sigma = theta[k].exp();
        let delta: Vec<T> = (0..q).map(|i| delta0[i] + scales[i] * theta[k + 1 + i]).collect();
        let model = template.with_params(SmoothingParams::from_slice(spec.family, &p)?, sigma * sigma)?;
        Ok((model, basis.mul_vec(&delta)))
    };
    let objective = |theta: &[T]| -> T {
        decode(theta)
            .and_then(|(m, x1)| tobit_objective(&m, series, &x1))
            .map(|(ll, _)| -ll)
            .unwrap_or(T::infinity())
    };

    let mut theta0: Vec<T> = start_params(&spec, options).into_iter().map(logit).collect();
    theta0.push(sigma0.ln());
    theta0.extend(std::iter::repeat(T::zero()).take(q));
    let nm = nm_options(theta0.len(), options);
    let res = nelder_mead(objective, &theta0, &nm);
    if !res.f.is_finite() {
        return Err(Error::NonFinite("Tobit likelihood at every trial point"));
    }

    let (model, x1) = decode(&res.x)?;
    let run = tobit_filter(&model, series, &x1)?;
    let n_params = k + 1 + q;
    let (aic, bic) = information_criteria(run.loglik, n_params, series.len());
    Ok(FitResult {
        at_boundary: boundary_flags(&spec, &model.params),
        final_state: run.final_state().to_vec(),
        loglik: run.loglik,
        model,
        x1,
        n_params,
        n_obs: series.len(),
        n_censored: series.n_censored(),
        aic,
        bic,
        init_mode: InitMode::Deterministic,
        converged: res.converged,
        n_evals: res.n_evals,
        trace: res.trace,
    })
}

/// Fits every candidate and returns the one with the smallest criterion.
///
/// Ties go to the model with fewer parameters, then to the earlier candidate.
pub fn select_model<T: Scalar>(
    series: &CensoredSeries<T>,
    candidates: &[ModelSpec],
    criterion: Criterion,
    options: &FitOptions<T>,
) -> Result<FitResult<T>> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("empty candidate list".into()));
    }
    let fits: Vec<Result<FitResult<T>>> = candidates
        .par_iter()
        .map(|&spec| fit(series, spec, options))
        .collect();
    fits.into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.ok().map(|f| (i, f)))
        .filter(|(_, f)| f.criterion(criterion).is_finite())
        .min_by(|(ia, a), (ib, b)| {
            a.criterion(criterion)
                .partial_cmp(&b.criterion(criterion))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.n_params.cmp(&b.n_params))
                .then(ia.cmp(ib))
        })
        .map(|(_, f)| f)
        .ok_or(Error::NoCandidateFitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Family;

    fn noisy(n: usize, level: f64, seed: u64) -> Vec<f64> {
        // small deterministic LCG noise in [-1, 1]
        let mut s = seed;
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                level + ((s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0)
            })
            .collect()
    }

    #[test]
    fn auto_policy_selects_init_mode() {
        let ys = noisy(40, 10.0, 1);
        let s = CensoredSeries::uncensored(&ys).unwrap();
        let f = fit(&s, ModelSpec::new(Family::Ann, None), &FitOptions::default()).unwrap();
        assert_eq!(f.init_mode, InitMode::Diffuse);
        assert_eq!(f.n_params, 2);

        let bound = vec![10.5; ys.len()];
        let s = CensoredSeries::from_latent(&ys, &bound).unwrap();
        assert!(s.n_censored() > 0);
        let f = fit(&s, ModelSpec::new(Family::Ann, None), &FitOptions::default()).unwrap();
        assert_eq!(f.init_mode, InitMode::Deterministic);
        assert_eq!(f.n_params, 3);
    }

    #[test]
    fn information_criteria_identities() {
        let ys = noisy(60, 5.0, 7);
        let s = CensoredSeries::uncensored(&ys).unwrap();
        let f = fit(&s, ModelSpec::new(Family::Aan, None), &FitOptions::default()).unwrap();
        let k = f.n_params as f64;
        assert!((f.aic - (-2.0 * f.loglik + 2.0 * k)).abs() < 1e-9);
        assert!((f.bic - (-2.0 * f.loglik + (60f64).ln() * k)).abs() < 1e-9);
        assert!(f.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn too_short() {
        let s = CensoredSeries::uncensored(&[1.0, 2.0, 3.0]).unwrap();
        let err = fit(&s, ModelSpec::new(Family::Aan, None), &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SeriesTooShort { needed: 4, have: 3 }));
    }

    #[test]
    fn single_candidate_is_returned() {
        let s = CensoredSeries::uncensored(&noisy(30, 3.0, 3)).unwrap();
        let spec = ModelSpec::new(Family::Aan, None);
        let f = select_model(&s, &[spec], Criterion::Aic, &FitOptions::default()).unwrap();
        assert_eq!(f.model.spec, spec);
        assert!(select_model(&s, &[], Criterion::Aic, &FitOptions::default()).is_err());
    }
}
