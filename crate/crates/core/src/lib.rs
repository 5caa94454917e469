//! Exponential smoothing for demand data censored from above.
//!
//! Models are linear innovations state space systems (ETS(A,N,N), ETS(A,A,N) and
//! ETS(A,A,A)) whose observation equation may be capped by a constant or
//! time-varying limit. When no observation sits on its cap the initial state is
//! treated as diffuse and estimated with an augmented Kalman filter; otherwise
//! it is estimated jointly with the smoothing parameters under the Tobit
//! likelihood.
//!
//! The numerical core is generic over the scalar type (`f32`/`f64`); the
//! aliases at the crate root fix it to `f64`, which is what the simulation
//! harnesses and the CLI use.
//!
//! ```
//! use tets::{fit, forecast, validate_series, Family, FitOptions, ModelSpec};
//!
//! let values: Vec<f64> = (0..60).map(|t| 100.0 + ((t * 37) % 11) as f64).collect();
//! let bound = vec![f64::INFINITY; values.len()];
//! let series = validate_series(&values, &bound).unwrap();
//! let fitted = fit(&series, ModelSpec::new(Family::Ann, None), &FitOptions::default()).unwrap();
//! let fc = forecast(&fitted.model, &fitted.final_state, 5, &[0.95]).unwrap();
//! assert_eq!(fc.mean.len(), 5);
//! ```

pub mod censored_gaussian;
mod error;
pub mod estimation;
pub mod filters;
pub mod forecasting;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod optim;
mod scalar;
pub mod series;
pub mod simulation;

pub use censored_gaussian::{
    censored_moments, kernel_values, std_normal_cdf, std_normal_pdf, std_normal_quantile,
    truncated_moments, CensorKernelValues,
};
pub use error::{Error, Result};
pub use estimation::{fit, select_model, Criterion, FitOptions, FitResult, InitMode, InitPolicy};
pub use filters::{akf_filter, plain_filter, tobit_filter, AkfRun, FilterRun};
pub use forecasting::{expected_sales, forecast, ForecastResult, PredictionInterval};
pub use metrics::{inventory_kpis, me, rmse, EvalReport, InventoryKpis};
pub use model::{build_model, Family, InnovationsModel, ModelSpec, SmoothingParams};
pub use scalar::Scalar;
pub use series::{validate_series, CensoredSeries};

/// Double-precision model.
pub type Model = InnovationsModel<f64>;
/// Double-precision censored series.
pub type Series = CensoredSeries<f64>;
/// Double-precision fit result.
pub type Fit = FitResult<f64>;
/// Double-precision forecast.
pub type Forecast = ForecastResult<f64>;
/// Double-precision filter output.
pub type TobitRun = FilterRun<f64>;
