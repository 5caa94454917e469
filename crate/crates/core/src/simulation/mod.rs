//! Reproducible harnesses for the case studies.
//!
//! * [`table1`]: Monte Carlo on iid Gaussian demand censored at a constant level.
//! * [`trend_seasonal`]: Holt-Winters data with a time-varying censoring level.
//! * [`newsvendor`]: closed loop where the order-up-to level censors sales.
//!
//! Every output is a pure function of its configuration and seed. Replicates
//! draw from independent ChaCha streams indexed by replicate number, so results
//! do not depend on how replicates are scheduled across threads.

pub mod fixtures;
mod generate;
pub mod newsvendor;
pub mod table1;
pub mod trend_seasonal;

pub use generate::{generate_gaussian, replicate_rng, MonteCarloConfig};
pub use newsvendor::{run_newsvendor, Forecaster, NewsvendorConfig, NewsvendorRun, PeriodLog};
pub use table1::{run_table1, Method, Table1, Table1Config, Table1Row};
pub use trend_seasonal::{run_trend_seasonal_case, TrendSeasonalReport};
