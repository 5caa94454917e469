use crate::model::{Family, ModelSpec};
use crate::scalar::Scalar;
use crate::series::CensoredSeries;

const NON_SEASONAL_WINDOW: usize = 10;

/// Standard deviation of first differences of the uncensored observations
/// (of all observations when every one is censored).
pub fn default_sigma_start<T: Scalar>(series: &CensoredSeries<T>) -> T {
    let values = series.values();
    let flags = series.is_censored();
    let pick: Vec<T> = if flags.iter().all(|&c| c) {
        values.to_vec()
    } else {
        values
            .iter()
            .zip(flags)
            .filter(|(_, &c)| !c)
            .map(|(&v, _)| v)
            .collect()
    };
    let diffs: Vec<T> = pick.windows(2).map(|w| w[1] - w[0]).collect();
    let sd = sample_sd(&diffs);
    if sd > T::zero() && sd.is_finite() {
        return sd;
    }
    let scale = values.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    T::lit(1e-3) * (scale + T::one())
}

fn sample_sd<T: Scalar>(v: &[T]) -> T {
    if v.len() < 2 {
        return T::zero();
    }
    let n = T::from_usize_lossy(v.len());
    let mean = v.iter().copied().sum::<T>() / n;
    let ss: T = v.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (ss / (n - T::one())).sqrt()
}

/// Level = mean of the first season, trend = 0, seasonal = first-season deviations.
///
/// Non-seasonal models use the first ten observations as "first season".
pub fn heuristic_initial_state<T: Scalar>(series: &CensoredSeries<T>, spec: &ModelSpec) -> Vec<T> {
    let values = series.values();
    let window = match spec.family {
        Family::Aaa => spec.season_length.unwrap_or(1),
        _ => NON_SEASONAL_WINDOW,
    }
    .min(values.len())
    .max(1);
    let head = &values[..window];
    let level = head.iter().copied().sum::<T>() / T::from_usize_lossy(window);

    let mut x = vec![T::zero(); spec.n_states()];
    x[0] = level;
    if let (Family::Aaa, Some(m)) = (spec.family, spec.season_length) {
        // observation j is served by seasonal slot 2 + (m - 1 - j)
        for j in 0..m {
            let dev = if j < head.len() { head[j] - level } else { T::zero() };
            x[2 + (m - 1 - j)] = dev;
        }
    }
    x
}
