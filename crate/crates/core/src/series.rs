//! Observations together with their upper censoring limits.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative tolerance used to decide that an observation sits on its limit.
pub const TIE_EPSILON: f64 = 1e-9;

/// A series censored from above. `bound[t] = +inf` means observation `t` cannot be censored.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSeries<T> {
    values: Vec<T>,
    bound: Vec<T>,
    is_censored: Vec<bool>,
}

/// Checks `values <= bound`, flags ties as censored and snaps them onto the bound.
pub fn validate_series<T: Scalar>(values: &[T], bound: &[T]) -> Result<CensoredSeries<T>> {
    if values.len() != bound.len() {
        return Err(Error::DimensionMismatch {
            what: "bound column",
            expected: values.len(),
            got: bound.len(),
        });
    }
    let mut out_values = Vec::with_capacity(values.len());
    let mut flags = Vec::with_capacity(values.len());
    for (t, (&y, &b)) in values.iter().zip(bound).enumerate() {
        if !y.is_finite() {
            return Err(Error::NonFinite("series values (missing values are not supported)"));
        }
        if b.is_nan() || b == T::neg_infinity() {
            return Err(Error::InvalidInput(format!("invalid bound at observation {}", t + 1)));
        }
        if b == T::infinity() {
            out_values.push(y);
            flags.push(false);
            continue;
        }
        let tol = T::lit(TIE_EPSILON) * b.abs().max(T::one());
        if y > b + tol {
            return Err(Error::AboveBound {
                index: t + 1,
                value: y.as_f64(),
                bound: b.as_f64(),
            });
        }
        let censored = y >= b - tol;
        out_values.push(if censored { b } else { y });
        flags.push(censored);
    }
    Ok(CensoredSeries {
        values: out_values,
        bound: bound.to_vec(),
        is_censored: flags,
    })
}

impl<T: Scalar> CensoredSeries<T> {
    /// A series with no censoring limit anywhere.
    pub fn uncensored(values: &[T]) -> Result<Self> {
        validate_series(values, &vec![T::infinity(); values.len()])
    }

    /// Clips a latent series at `bound` and validates the result.
    pub fn from_latent(latent: &[T], bound: &[T]) -> Result<Self> {
        if latent.len() != bound.len() {
            return Err(Error::DimensionMismatch {
                what: "bound column",
                expected: latent.len(),
                got: bound.len(),
            });
        }
        let clipped: Vec<T> = latent.iter().zip(bound).map(|(&y, &b)| y.min(b)).collect();
        validate_series(&clipped, bound)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn bound(&self) -> &[T] {
        &self.bound
    }

    pub fn is_censored(&self) -> &[bool] {
        &self.is_censored
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_censored(&self) -> usize {
        self.is_censored.iter().filter(|&&c| c).count()
    }

    pub fn has_finite_bound(&self) -> bool {
        self.bound.iter().any(|b| b.is_finite())
    }

    /// First `n` observations.
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            values: self.values[..n].to_vec(),
            bound: self.bound[..n].to_vec(),
            is_censored: self.is_censored[..n].to_vec(),
        }
    }

    /// Same values with every limit removed.
    pub fn without_bound(&self) -> Self {
        Self {
            values: self.values.clone(),
            bound: vec![T::infinity(); self.len()],
            is_censored: vec![false; self.len()],
        }
    }

    /// Adds `delta` to values and finite bounds.
    pub fn shifted(&self, delta: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v + delta).collect(),
            bound: self.bound.iter().map(|&b| b + delta).collect(),
            is_censored: self.is_censored.clone(),
        }
    }
}
