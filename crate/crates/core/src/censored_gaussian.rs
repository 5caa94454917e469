//! Standard Gaussian kernels and moments of Gaussian variables censored or
//! truncated from above.
//!
//! Notation: for `x ~ N(mu, sigma^2)` and an upper limit `a`, the standardized
//! limit is `z = (a - mu) / sigma`. `Phi`/`phi` are the standard normal cdf/pdf.
//!
//! An upper limit of `+inf` is the canonical encoding of "no censoring".

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Below this uncensored probability an observation is treated as fully censored.
pub const UNDERFLOW_P_UN: f64 = 1e-12;

/// Censoring quantities for one observation with predicted mean `mu`,
/// scale `sigma` and upper limit `y_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensorKernelValues<T> {
    /// Standardized censor distance `(y_max - mu) / sigma`.
    pub z: T,
    /// Probability of observing the value uncensored, `Phi(z)`.
    pub p_un: T,
    /// Probability of the value sitting on its limit, `1 - Phi(z)`.
    pub p_max: T,
    /// Inverse Mills ratio `phi(z) / Phi(z)`.
    pub mills: T,
    /// Tail-weight term `-z phi(z)`.
    pub c: T,
}

impl<T: Scalar> CensorKernelValues<T> {
    /// Kernel of an observation that can never be censored.
    pub fn uncensored() -> Self {
        Self {
            z: T::infinity(),
            p_un: T::one(),
            p_max: T::zero(),
            mills: T::zero(),
            c: T::zero(),
        }
    }

    pub fn is_uncensorable(&self) -> bool {
        self.z == T::infinity()
    }

    /// `1 + c/p_un - mills^2`, the variance of the censored innovation in units of `sigma^2`.
    ///
    /// Evaluated as `1 - z*mills - mills^2`, which is algebraically identical and
    /// stays finite when `p_un` underflows.
    pub fn variance_factor(&self) -> T {
        if self.is_uncensorable() {
            return T::one();
        }
        T::one() - self.z * self.mills - self.mills * self.mills
    }

    /// State-update multiplier `p_un / (1 + c/p_un - mills^2)` applied to the gain.
    pub fn gain_multiplier(&self) -> T {
        self.p_un / self.variance_factor()
    }

    /// True when `p_un` is below the underflow guard.
    pub fn is_degenerate(&self) -> bool {
        self.p_un < T::lit(UNDERFLOW_P_UN)
    }

    /// Natural log of `p_max`, accurate deep in the upper tail.
    pub fn ln_p_max(&self) -> T {
        ln_upper_tail(self.z)
    }
}

/// `exp(x^2) erfc(x)` from the Laplace continued fraction (modified Lentz), for large `x`.
fn scaled_erfc_cf<T: Scalar>(x: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let eps = T::epsilon();
    let half = T::lit(0.5);
    // K = 1 / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    let mut k = T::one();
    for _ in 0..500 {
        let a = k * half;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() < eps {
            break;
        }
        k = k + T::one();
    }
    T::FRAC_2_SQRT_PI() / (T::lit(2.0) * f)
}

// libm's erfc is used below this point; the continued fraction converges
// in a handful of terms above it and does not underflow.
const CF_SWITCH: f64 = 20.0;

/// Complementary error function.
pub(crate) fn erfc<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x >= T::lit(CF_SWITCH) {
        if x == T::infinity() {
            return T::zero();
        }
        return (-x * x).exp() * scaled_erfc_cf(x);
    }
    T::lit(libm::erfc(x.as_f64()))
}

#[inline]
pub(crate) fn phi<T: Scalar>(z: T) -> T {
    (-(z * z) * T::lit(0.5)).exp() / (T::TAU()).sqrt()
}

#[inline]
fn upper_tail<T: Scalar>(z: T) -> T {
    T::lit(0.5) * erfc(z * T::FRAC_1_SQRT_2())
}

/// `ln(1 - Phi(z))` without underflow for large `z`.
pub(crate) fn ln_upper_tail<T: Scalar>(z: T) -> T {
    let x = z * T::FRAC_1_SQRT_2();
    if x >= T::lit(CF_SWITCH) && x.is_finite() {
        -(x * x) + (T::lit(0.5) * scaled_erfc_cf(x)).ln()
    } else {
        upper_tail(z).ln()
    }
}

/// `ln Phi(z)` without underflow for very negative `z`.
pub fn ln_std_normal_cdf<T: Scalar>(z: T) -> T {
    ln_upper_tail(-z)
}

/// Inverse Mills ratio `phi(z)/Phi(z)`, stable for very negative `z`.
fn inverse_mills<T: Scalar>(z: T) -> T {
    if z == T::infinity() {
        return T::zero();
    }
    let x = -z * T::FRAC_1_SQRT_2();
    if x >= T::lit(CF_SWITCH) {
        (T::lit(2.0) / T::PI()).sqrt() / scaled_erfc_cf(x)
    } else {
        phi(z) / std_normal_cdf(z)
    }
}

/// Standard normal density. Rejects non-finite input.
pub fn std_normal_pdf<T: Scalar>(z: T) -> Result<T> {
    if !z.is_finite() {
        return Err(Error::NonFinite("std_normal_pdf argument"));
    }
    Ok(phi(z))
}

/// Standard normal distribution function. Accepts `±inf`; NaN propagates.
pub fn std_normal_cdf<T: Scalar>(z: T) -> T {
    T::lit(0.5) * erfc(-z * T::FRAC_1_SQRT_2())
}

/// Standard normal quantile for `p` in the open unit interval.
pub fn std_normal_quantile<T: Scalar>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::InvalidInput(format!(
            "quantile probability must lie in (0, 1), got {p}"
        )));
    }
    let pf = p.as_f64();
    let mut x = T::lit(acklam(pf));
    // Halley refinement; the upper half is refined against the upper tail so
    // probabilities near one keep their resolution.
    let upper = p > T::lit(0.5);
    let q = T::one() - p;
    for _ in 0..3 {
        let e = if upper {
            q - upper_tail(x)
        } else {
            std_normal_cdf(x) - p
        };
        let u = e * T::TAU().sqrt() * (x * x * T::lit(0.5)).exp();
        let step = u / (T::one() + x * u * T::lit(0.5));
        if !step.is_finite() {
            break;
        }
        x = x - step;
    }
    Ok(x)
}

/// Acklam's rational approximation (relative error ~1e-9) used as the Halley seed.
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

fn check_sigma<T: Scalar>(sigma: T) -> Result<()> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

/// Censoring kernel for a Gaussian with mean `mu` and scale `sigma` capped at `y_max`.
pub fn kernel_values<T: Scalar>(mu: T, sigma: T, y_max: T) -> Result<CensorKernelValues<T>> {
    check_sigma(sigma)?;
    if !mu.is_finite() {
        return Err(Error::NonFinite("kernel mean"));
    }
    if y_max.is_nan() || y_max == T::neg_infinity() {
        return Err(Error::InvalidInput(format!("invalid censoring limit {y_max}")));
    }
    if y_max == T::infinity() {
        return Ok(CensorKernelValues::uncensored());
    }
    Ok(kernel_from_z((y_max - mu) / sigma))
}

/// Kernel from an already standardized, finite `z`.
pub(crate) fn kernel_from_z<T: Scalar>(z: T) -> CensorKernelValues<T> {
    let (p_un, p_max) = if z > T::zero() {
        let p_max = upper_tail(z);
        (T::one() - p_max, p_max)
    } else {
        let p_un = std_normal_cdf(z);
        (p_un, T::one() - p_un)
    };
    let density = phi(z);
    CensorKernelValues {
        z,
        p_un,
        p_max,
        mills: inverse_mills(z),
        c: -z * density,
    }
}

/// Mean and variance of `x ~ N(mu, sigma^2)` truncated to `x <= a`.
pub fn truncated_moments<T: Scalar>(mu: T, sigma: T, a: T) -> Result<(T, T)> {
    let k = kernel_values(mu, sigma, a)?;
    if k.is_uncensorable() {
        return Ok((mu, sigma * sigma));
    }
    if k.is_degenerate() {
        return Err(Error::AllMassCensored(k.p_un.as_f64()));
    }
    let mean = mu - sigma * k.mills;
    let var = sigma * sigma * k.variance_factor();
    Ok((mean, var))
}

/// Mean of `min(x, a)` for `x ~ N(mu, sigma^2)`, paired with the truncated
/// variance (the conditional spread of the uncensored part, which is what the
/// filter gain uses). See [`clipped_variance`] for the variance of `min(x, a)` itself.
pub fn censored_moments<T: Scalar>(mu: T, sigma: T, a: T) -> Result<(T, T)> {
    let k = kernel_values(mu, sigma, a)?;
    let (t_mean, t_var) = truncated_moments(mu, sigma, a)?;
    if k.is_uncensorable() {
        return Ok((t_mean, t_var));
    }
    Ok((k.p_max * a + k.p_un * t_mean, t_var))
}

/// Variance of the clipped variable `min(x, a)` for `x ~ N(mu, sigma^2)`.
pub fn clipped_variance<T: Scalar>(mu: T, sigma: T, a: T) -> Result<T> {
    let k = kernel_values(mu, sigma, a)?;
    let (t_mean, t_var) = truncated_moments(mu, sigma, a)?;
    if k.is_uncensorable() {
        return Ok(t_var);
    }
    let mean = k.p_max * a + k.p_un * t_mean;
    let dt = t_mean - mean;
    let da = a - mean;
    Ok(k.p_un * (t_var + dt * dt) + k.p_max * da * da)
}
