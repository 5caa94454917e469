use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::model::InnovationsModel;
use crate::scalar::Scalar;
use crate::series::CensoredSeries;

/// Largest accepted condition estimate of the accumulated information matrix.
pub const MAX_CONDITION: f64 = 1e12;

/// Output of the augmented filter.
///
/// The recursions start from a zero state; `A_t` tracks how the unknown
/// initial state `delta` propagates, so that `x_t = x_t^- - A_t delta` and
/// `e_t = e_t^- - V_t delta`. All states are diffuse; for seasonal models
/// `delta` holds the free coordinates of [`ModelSpec::init_basis`](crate::ModelSpec::init_basis).
#[derive(Debug, Clone)]
pub struct AkfRun<T> {
    pub states_minus: Vec<Vec<T>>,
    pub eps_minus: Vec<T>,
    /// `A_t` after observation `t` (`n_states x q`).
    pub a_t: Vec<Matrix<T>>,
    /// `V_t = -w A_{t-1}` (length `q`).
    pub v_t: Vec<Vec<T>>,
    /// `s_n = sum V_t' e_t^-`.
    pub s_n: Vec<T>,
    /// `S_n = sum V_t' V_t`.
    pub s_mat: Matrix<T>,
    /// Free initial-state coordinates `S_n^{-1} s_n`.
    pub delta_hat: Vec<T>,
    /// Full initial state (state used to predict the first observation).
    pub x1_hat: Vec<T>,
    /// Filtered state after the last observation, `x_n^- - A_n delta_hat`.
    pub final_state: Vec<T>,
    pub sigma2_hat: T,
    /// Diffuse log-likelihood with `sigma^2` concentrated out.
    pub loglik_diffuse: T,
    pub ln_det_s: T,
}

pub fn akf_filter<T: Scalar>(model: &InnovationsModel<T>, series: &CensoredSeries<T>) -> Result<AkfRun<T>> {
    run(model, series.values(), true)
}

/// `(loglik_diffuse, sigma2_hat, x1_hat, final_state)` without the per-step trace.
pub(crate) fn akf_objective<T: Scalar>(
    model: &InnovationsModel<T>,
    values: &[T],
) -> Result<(T, T, Vec<T>, Vec<T>)> {
    let r = run(model, values, false)?;
    Ok((r.loglik_diffuse, r.sigma2_hat, r.x1_hat, r.final_state))
}

fn run<T: Scalar>(model: &InnovationsModel<T>, values: &[T], record: bool) -> Result<AkfRun<T>> {
    let basis: Matrix<T> = model.spec.init_basis();
    let n_states = model.n_states();
    let q = basis.cols();
    let n = values.len();
    if n <= q {
        return Err(Error::SeriesTooShort {
            needed: q + 1,
            have: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("series values"));
    }

    let mut x = vec![T::zero(); n_states];
    let mut a = basis.scale(-T::one());
    let mut s = vec![T::zero(); q];
    let mut s_mat = Matrix::zeros(q, q);
    let mut sse = T::zero();

    let cap = if record { n } else { 0 };
    let mut states_minus = Vec::with_capacity(cap);
    let mut eps_minus = Vec::with_capacity(cap);
    let mut a_t = Vec::with_capacity(cap);
    let mut v_t = Vec::with_capacity(cap);

    for &y in values {
        let v: Vec<T> = a.vec_mul(&model.w).into_iter().map(|e| -e).collect();
        let e = y - dot(&model.w, &x);
        let mut xn = vec![T::zero(); n_states];
        model.transition_into(&x, &mut xn);
        for (slot, &g) in xn.iter_mut().zip(&model.g) {
            *slot = *slot + g * e;
        }
        x = xn;
        let mut an = model.transition_matrix(&a);
        an.add_outer(T::one(), &model.g, &v);
        a = an;

        for (si, &vi) in s.iter_mut().zip(&v) {
            *si = *si + vi * e;
        }
        s_mat.add_outer(T::one(), &v, &v);
        sse = sse + e * e;

        if record {
            states_minus.push(x.clone());
            eps_minus.push(e);
            a_t.push(a.clone());
            v_t.push(v);
        }
    }

    let chol = s_mat
        .cholesky()
        .ok_or_else(|| Error::Singular("information matrix is not positive definite".into()))?;
    let cond = chol.condition_estimate();
    if !(cond <= T::lit(MAX_CONDITION)) {
        return Err(Error::Singular(format!("condition estimate {:e} above {MAX_CONDITION:e}", cond.as_f64())));
    }
    let delta = chol.solve(&s);
    let quad = dot(&s, &delta);
    let dof = T::from_usize_lossy(n - q);
    let sigma2_hat = ((sse - quad) / dof).max(T::min_positive_value());
    let ln_det_s = chol.ln_det();
    let loglik = -T::lit(0.5) * (dof * (T::TAU().ln() + sigma2_hat.ln() + T::one()) + ln_det_s);

    let x1_hat = basis.mul_vec(&delta);
    let correction = a.mul_vec(&delta);
    let final_state: Vec<T> = x.iter().zip(&correction).map(|(&xm, &c)| xm - c).collect();

    Ok(AkfRun {
        states_minus,
        eps_minus,
        a_t,
        v_t,
        s_n: s,
        s_mat,
        delta_hat: delta,
        x1_hat,
        final_state,
        sigma2_hat,
        loglik_diffuse: loglik,
        ln_det_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::plain_filter;
    use crate::model::{build_model, Family, SmoothingParams};

    #[test]
    fn constant_series_level() {
        let m = build_model(Family::Ann, None, SmoothingParams::ann(0.4), 1.0f64).unwrap();
        let s = CensoredSeries::uncensored(&[7.5; 20]).unwrap();
        let r = akf_filter(&m, &s).unwrap();
        assert!((r.x1_hat[0] - 7.5).abs() < 1e-12);
        let run = plain_filter(&m, &s, &r.x1_hat).unwrap();
        assert!(run.innovations.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn exact_line_recovers_level_and_slope() {
        let ys: Vec<f64> = (2..30).map(|t| 2.0 + 3.0 * t as f64).collect();
        let m = build_model(Family::Aan, None, SmoothingParams::aan(0.3, 0.1), 1.0f64).unwrap();
        let r = akf_filter(&m, &CensoredSeries::uncensored(&ys).unwrap()).unwrap();
        assert!((r.x1_hat[0] - 5.0).abs() < 1e-9, "{:?}", r.x1_hat);
        assert!((r.x1_hat[1] - 3.0).abs() < 1e-9);
        assert!((r.final_state[0] - ys[ys.len() - 1]).abs() < 1e-9);
    }

    #[test]
    fn too_short_is_rejected() {
        let m = build_model(Family::Aan, None, SmoothingParams::aan(0.3, 0.1), 1.0f64).unwrap();
        let s = CensoredSeries::uncensored(&[1.0, 2.0]).unwrap();
        assert!(matches!(akf_filter(&m, &s), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn running_sums_match_trace() {
        let ys = [3.0, 5.0, 4.0, 6.5, 5.5, 7.0, 6.0];
        let m = build_model(Family::Aan, None, SmoothingParams::aan(0.5, 0.2), 1.0f64).unwrap();
        let r = akf_filter(&m, &CensoredSeries::uncensored(&ys).unwrap()).unwrap();
        let mut s = [0.0; 2];
        let mut big = [[0.0; 2]; 2];
        for (v, e) in r.v_t.iter().zip(&r.eps_minus) {
            for i in 0..2 {
                s[i] += v[i] * e;
                for j in 0..2 {
                    big[i][j] += v[i] * v[j];
                }
            }
        }
        for i in 0..2 {
            assert!((s[i] - r.s_n[i]).abs() < 1e-12);
            for j in 0..2 {
                assert!((big[i][j] - r.s_mat[(i, j)]).abs() < 1e-12);
            }
        }
        // V_1 = -w A_0 with A_0 = -I
        assert_eq!(r.v_t[0], vec![1.0, 1.0]);
    }
}
