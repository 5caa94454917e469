use crate::censored_gaussian::{kernel_from_z, ln_upper_tail, CensorKernelValues};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::model::InnovationsModel;
use crate::scalar::Scalar;
use crate::series::CensoredSeries;

/// Per-step output of a filter pass.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterRun<T> {
    /// State used to predict the first observation.
    pub initial_state: Vec<T>,
    /// `states[t]` is the filtered state after observation `t`.
    pub states: Vec<Vec<T>>,
    /// `values[t] - predicted_mean[t]`.
    pub innovations: Vec<T>,
    /// One-step prediction of the observed (possibly censored) value.
    pub predicted_mean: Vec<T>,
    pub kernel: Vec<CensorKernelValues<T>>,
    pub loglik: T,
    pub n_censored: usize,
    /// Steps where the uncensored probability underflowed and the update was skipped.
    pub n_degenerate: usize,
}

impl<T: Scalar> FilterRun<T> {
    /// Filtered state after the last observation.
    pub fn final_state(&self) -> &[T] {
        self.states.last().unwrap_or(&self.initial_state)
    }
}

/// Innovations filter from a known initial state. Censoring limits are ignored.
pub fn plain_filter<T: Scalar>(
    model: &InnovationsModel<T>,
    series: &CensoredSeries<T>,
    x1: &[T],
) -> Result<FilterRun<T>> {
    run(model, series, x1, false, true)
}

/// Tobit-corrected innovations filter from a known initial state.
///
/// With every limit at `+inf` this reproduces [`plain_filter`] exactly.
pub fn tobit_filter<T: Scalar>(
    model: &InnovationsModel<T>,
    series: &CensoredSeries<T>,
    x1: &[T],
) -> Result<FilterRun<T>> {
    run(model, series, x1, true, true)
}

/// Tobit log-likelihood and final state without recording the per-step trace.
pub(crate) fn tobit_objective<T: Scalar>(
    model: &InnovationsModel<T>,
    series: &CensoredSeries<T>,
    x1: &[T],
) -> Result<(T, Vec<T>)> {
    let r = run(model, series, x1, true, false)?;
    let last = r.final_state().to_vec();
    Ok((r.loglik, last))
}

fn run<T: Scalar>(
    model: &InnovationsModel<T>,
    series: &CensoredSeries<T>,
    x1: &[T],
    censoring: bool,
    record: bool,
) -> Result<FilterRun<T>> {
    model.check_state(x1)?;
    let n = series.len();
    let sigma = model.sigma();
    let ln_sigma = sigma.ln();
    let half = T::lit(0.5);
    let ln_sqrt_2pi = half * T::TAU().ln();

    let cap = if record { n } else { 0 };
    let mut out = FilterRun {
        initial_state: x1.to_vec(),
        states: Vec::with_capacity(cap),
        innovations: Vec::with_capacity(cap),
        predicted_mean: Vec::with_capacity(cap),
        kernel: Vec::with_capacity(cap),
        loglik: T::zero(),
        n_censored: 0,
        n_degenerate: 0,
    };

    let mut x = x1.to_vec();
    let mut next = vec![T::zero(); x.len()];
    let mut loglik = T::zero();
    for t in 0..n {
        let y = series.values()[t];
        let limit = series.bound()[t];
        let mu = dot(&model.w, &x);

        let (kernel, predicted, multiplier) = if censoring && limit.is_finite() {
            let k = kernel_from_z((limit - mu) / sigma);
            let predicted = k.p_un * (mu - sigma * k.mills) + k.p_max * limit;
            let multiplier = if k.is_degenerate() {
                None
            } else {
                Some(k.gain_multiplier())
            };
            (k, predicted, multiplier)
        } else {
            (CensorKernelValues::uncensored(), mu, Some(T::one()))
        };

        let eps = y - predicted;
        model.transition_into(&x, &mut next);
        match multiplier {
            Some(m) if m == T::one() => {
                for (slot, &g) in next.iter_mut().zip(&model.g) {
                    *slot = *slot + g * eps;
                }
            }
            Some(m) => {
                let scaled = m * eps;
                for (slot, &g) in next.iter_mut().zip(&model.g) {
                    *slot = *slot + g * scaled;
                }
            }
            None => out.n_degenerate += 1,
        }
        std::mem::swap(&mut x, &mut next);

        let censored = censoring && series.is_censored()[t];
        if censored {
            out.n_censored += 1;
            loglik = loglik + ln_upper_tail(kernel.z);
        } else {
            let u = (y - mu) / sigma;
            loglik = loglik - half * u * u - ln_sqrt_2pi - ln_sigma;
        }

        if record {
            out.states.push(x.clone());
            out.innovations.push(eps);
            out.predicted_mean.push(predicted);
            out.kernel.push(kernel);
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("filtered state"));
    }
    if !record {
        out.states.push(x);
    }
    out.loglik = loglik;
    Ok(out)
}
