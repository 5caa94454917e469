//! Innovations state space form of the additive ETS family members.
//!
//! ```text
//! y_t = w x_{t-1} + e_t
//! x_t = F x_{t-1} + g e_t,        e_t ~ N(0, sigma^2)
//! ```
//!
//! State layouts:
//!
//! * `ANN`: `[level]`
//! * `AAN`: `[level, trend]`
//! * `AAA`: `[level, trend, s_t, s_{t-1}, ..., s_{t-m+1}]`; the last seasonal
//!   slot is the one read by the next observation and is refreshed into the
//!   first slot, the rest shift down by one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Simple exponential smoothing, ETS(A,N,N).
    Ann,
    /// Holt's linear trend, ETS(A,A,N).
    Aan,
    /// Additive Holt-Winters, ETS(A,A,A).
    Aaa,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ann => "ANN",
            Family::Aan => "AAN",
            Family::Aaa => "AAA",
        }
    }

    pub fn n_smoothing(self) -> usize {
        match self {
            Family::Ann => 1,
            Family::Aan => 2,
            Family::Aaa => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        match key.as_str() {
            "ANN" | "SES" => Ok(Family::Ann),
            "AAN" | "HOLT" => Ok(Family::Aan),
            "AAA" | "HW" | "HOLTWINTERS" => Ok(Family::Aaa),
            _ => Err(Error::InvalidInput(format!("unknown model family `{s}`"))),
        }
    }
}

/// Family plus season length: everything that fixes the state dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub season_length: Option<usize>,
}

impl ModelSpec {
    /// Season length is dropped for non-seasonal families.
    pub fn new(family: Family, season_length: Option<usize>) -> Self {
        let season_length = match family {
            Family::Aaa => season_length,
            _ => None,
        };
        Self {
            family,
            season_length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == Family::Aaa {
            match self.season_length {
                Some(m) if m >= 2 => {}
                Some(m) => {
                    return Err(Error::InvalidInput(format!(
                        "season length must be at least 2, got {m}"
                    )))
                }
                None => return Err(Error::InvalidInput("AAA requires a season length".into())),
            }
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        match self.family {
            Family::Ann => 1,
            Family::Aan => 2,
            Family::Aaa => 2 + self.season_length.unwrap_or(0),
        }
    }

    /// Number of free initial-state coordinates (seasonal states sum to zero).
    pub fn n_free_states(&self) -> usize {
        match self.family {
            Family::Aaa => self.n_states() - 1,
            _ => self.n_states(),
        }
    }

    /// Maps free initial-state coordinates onto the full state (`n_states x n_free_states`).
    ///
    /// Identity for ANN/AAN. For AAA the last seasonal slot is minus the sum of the
    /// others, which removes the level/season confounding of the initial state.
    pub fn init_basis<T: Scalar>(&self) -> Matrix<T> {
        let n = self.n_states();
        let q = self.n_free_states();
        let mut a = Matrix::zeros(n, q);
        for i in 0..q {
            a[(i, i)] = T::one();
        }
        if self.family == Family::Aaa {
            for j in 2..q {
                a[(n - 1, j)] = -T::one();
            }
        }
        a
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self.family {
            Family::Ann => &["alpha"],
            Family::Aan => &["alpha", "beta"],
            Family::Aaa => &["alpha", "beta", "gamma"],
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.season_length {
            Some(m) => write!(f, "{}({m})", self.family),
            None => write!(f, "{}", self.family),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// Accepts `ANN`, `AAN`, `AAA(7)` or `AAA:7`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, season) = match s.find(['(', ':']) {
            Some(i) => {
                let digits = s[i + 1..].trim_end_matches(')').trim();
                let m = digits
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad season length in `{s}`")))?;
                (&s[..i], Some(m))
            }
            None => (s, None),
        };
        let spec = ModelSpec::new(name.parse()?, season);
        spec.validate()?;
        Ok(spec)
    }
}

/// Smoothing constants. `beta` and `gamma` are present exactly when the family uses them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams<T> {
    pub alpha: T,
    pub beta: Option<T>,
    pub gamma: Option<T>,
}

impl<T: Scalar> SmoothingParams<T> {
    pub fn ann(alpha: T) -> Self {
        Self {
            alpha,
            beta: None,
            gamma: None,
        }
    }

    pub fn aan(alpha: T, beta: T) -> Self {
        Self {
            alpha,
            beta: Some(beta),
            gamma: None,
        }
    }

    pub fn aaa(alpha: T, beta: T, gamma: T) -> Self {
        Self {
            alpha,
            beta: Some(beta),
            gamma: Some(gamma),
        }
    }

    pub fn to_vec(&self) -> Vec<T> {
        std::iter::once(self.alpha)
            .chain(self.beta)
            .chain(self.gamma)
            .collect()
    }

    /// Inverse of [`to_vec`](Self::to_vec) for the given family.
    pub fn from_slice(family: Family, v: &[T]) -> Result<Self> {
        if v.len() != family.n_smoothing() {
            return Err(Error::DimensionMismatch {
                what: "smoothing parameters",
                expected: family.n_smoothing(),
                got: v.len(),
            });
        }
        Ok(match family {
            Family::Ann => Self::ann(v[0]),
            Family::Aan => Self::aan(v[0], v[1]),
            Family::Aaa => Self::aaa(v[0], v[1], v[2]),
        })
    }
}

/// System matrices `(F, w, g)` and innovation variance of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationsModel<T> {
    pub spec: ModelSpec,
    pub params: SmoothingParams<T>,
    pub sigma2: T,
    pub f: Matrix<T>,
    pub w: Vec<T>,
    pub g: Vec<T>,
    /// Nonzero entries of `f` as `(row, col, value)`.
    f_nz: Vec<(usize, usize, T)>,
}

/// Builds the innovations system for a family member.
pub fn build_model<T: Scalar>(
    family: Family,
    season_length: Option<usize>,
    params: SmoothingParams<T>,
    sigma2: T,
) -> Result<InnovationsModel<T>> {
    InnovationsModel::new(ModelSpec::new(family, season_length), params, sigma2)
}

impl<T: Scalar> InnovationsModel<T> {
    pub fn new(spec: ModelSpec, params: SmoothingParams<T>, sigma2: T) -> Result<Self> {
        spec.validate()?;
        let values = params.to_vec();
        if values.len() != spec.family.n_smoothing() {
            return Err(Error::InvalidInput(format!(
                "{} needs {} smoothing parameters, got {}",
                spec.family,
                spec.family.n_smoothing(),
                values.len()
            )));
        }
        for (name, v) in spec.param_names().iter().zip(&values) {
            if !(*v >= T::zero() && *v <= T::one()) {
                return Err(Error::InvalidInput(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if !(sigma2 > T::zero()) || !sigma2.is_finite() {
            return Err(Error::InvalidInput(format!(
                "innovation variance must be positive, got {sigma2}"
            )));
        }

        let n = spec.n_states();
        let mut f = Matrix::zeros(n, n);
        let mut w = vec![T::zero(); n];
        let mut g = vec![T::zero(); n];
        f[(0, 0)] = T::one();
        w[0] = T::one();
        g[0] = params.alpha;
        if let Some(beta) = params.beta {
            f[(0, 1)] = T::one();
            f[(1, 1)] = T::one();
            w[1] = T::one();
            g[1] = beta;
        }
        if let (Some(gamma), Some(m)) = (params.gamma, spec.season_length) {
            let first = 2;
            let last = 2 + m - 1;
            w[last] = T::one();
            g[first] = gamma;
            f[(first, last)] = T::one();
            for k in first + 1..=last {
                f[(k, k - 1)] = T::one();
            }
        }
        let mut f_nz = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if f[(r, c)] != T::zero() {
                    f_nz.push((r, c, f[(r, c)]));
                }
            }
        }
        Ok(Self {
            spec,
            params,
            sigma2,
            f,
            w,
            g,
            f_nz,
        })
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn n_states(&self) -> usize {
        self.w.len()
    }

    pub fn sigma(&self) -> T {
        self.sigma2.sqrt()
    }

    /// Same structure with new parameters.
    pub fn with_params(&self, params: SmoothingParams<T>, sigma2: T) -> Result<Self> {
        Self::new(self.spec, params, sigma2)
    }

    /// `out = F x`.
    #[inline]
    pub fn transition_into(&self, x: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        for &(r, c, v) in &self.f_nz {
            out[r] = out[r] + v * x[c];
        }
    }

    /// `F A` for a state-by-anything matrix `A`.
    pub fn transition_matrix(&self, a: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(a.rows(), a.cols());
        for &(r, c, v) in &self.f_nz {
            for j in 0..a.cols() {
                out[(r, j)] = out[(r, j)] + v * a[(c, j)];
            }
        }
        out
    }

    pub(crate) fn check_state(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n_states() {
            return Err(Error::DimensionMismatch {
                what: "state vector",
                expected: self.n_states(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        Ok(())
    }
}
