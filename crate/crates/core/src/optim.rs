//! Derivative-free minimization (Nelder-Mead with restarts).

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct NelderMeadOptions<T> {
    /// Initial simplex edge along each coordinate.
    pub step: Vec<T>,
    pub max_evals: usize,
    /// Stop when the objective spread over the simplex falls below this.
    pub f_tol: T,
    /// ...and every vertex is within this distance (max-norm) of the best one.
    pub x_tol: T,
    /// Fresh simplices built around the optimum after convergence.
    pub restarts: usize,
}

impl<T: Scalar> NelderMeadOptions<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            step: vec![T::lit(0.5); dim],
            max_evals: 50_000,
            f_tol: T::lit(1e-8),
            x_tol: T::lit(1e-6),
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimResult<T> {
    pub x: Vec<T>,
    pub f: T,
    pub n_evals: usize,
    pub n_iters: usize,
    pub converged: bool,
    /// Best objective value after every iteration.
    pub trace: Vec<T>,
}

struct Counted<'a, T, F> {
    f: &'a mut F,
    evals: usize,
    _t: std::marker::PhantomData<T>,
}

impl<T: Scalar, F: FnMut(&[T]) -> T> Counted<'_, T, F> {
    fn call(&mut self, x: &[T]) -> T {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    }
}

/// Minimizes `f` starting from `x0`.
pub fn nelder_mead<T, F>(mut f: F, x0: &[T], opts: &NelderMeadOptions<T>) -> OptimResult<T>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let n = x0.len();
    assert_eq!(opts.step.len(), n, "step length must match dimension");
    let mut obj = Counted {
        f: &mut f,
        evals: 0,
        _t: std::marker::PhantomData,
    };
    let mut trace = Vec::new();
    let mut best_x = x0.to_vec();
    let mut best_f = obj.call(x0);
    if n == 0 {
        return OptimResult {
            x: best_x,
            f: best_f,
            n_evals: obj.evals,
            n_iters: 0,
            converged: true,
            trace,
        };
    }

    let mut n_iters = 0;
    let mut converged = false;
    for round in 0..=opts.restarts {
        let start_f = best_f;
        let (x, fx, ok) = simplex_search(&mut obj, &best_x, best_f, opts, &mut trace, &mut n_iters);
        best_x = x;
        best_f = fx;
        converged = ok;
        if !ok || obj.evals >= opts.max_evals {
            break;
        }
        if round > 0 && start_f - best_f < opts.f_tol {
            break;
        }
    }
    OptimResult {
        x: best_x,
        f: best_f,
        n_evals: obj.evals,
        n_iters,
        converged,
        trace,
    }
}

fn simplex_search<T, F>(
    obj: &mut Counted<'_, T, F>,
    x0: &[T],
    f0: T,
    opts: &NelderMeadOptions<T>,
    trace: &mut Vec<T>,
    n_iters: &mut usize,
) -> (Vec<T>, T, bool)
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let n = x0.len();
    let nf = T::from_usize_lossy(n);
    let (rho, chi, gamma, shrink) = if n <= 2 {
        (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5))
    } else {
        // dimension-adaptive coefficients
        (
            T::one(),
            T::one() + T::lit(2.0) / nf,
            T::lit(0.75) - T::lit(0.5) / nf,
            T::one() - T::one() / nf,
        )
    };

    let mut pts: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    let mut vals: Vec<T> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    vals.push(f0);
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] = p[i] + opts.step[i];
        vals.push(obj.call(&p));
        pts.push(p);
    }

    let combine = |a: &[T], b: &[T], t: T| -> Vec<T> {
        // a + t (b - a)
        a.iter().zip(b).map(|(&ai, &bi)| ai + t * (bi - ai)).collect()
    };

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        trace.push(vals[0]);

        let spread = vals[n] - vals[0];
        let size = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(&a, &b)| (a - b).abs()))
            .fold(T::zero(), T::max);
        if (spread <= opts.f_tol || (vals[0].is_infinite() && vals[n].is_infinite())) && size <= opts.x_tol {
            return (pts[0].clone(), vals[0], vals[0].is_finite());
        }
        if obj.evals >= opts.max_evals {
            return (pts[0].clone(), vals[0], false);
        }
        *n_iters += 1;

        let mut centroid = vec![T::zero(); n];
        for p in &pts[..n] {
            for (c, &v) in centroid.iter_mut().zip(p) {
                *c = *c + v;
            }
        }
        for c in &mut centroid {
            *c = *c / nf;
        }

        let xr = combine(&centroid, &pts[n], -rho);
        let fr = obj.call(&xr);
        if fr < vals[0] {
            let xe = combine(&centroid, &pts[n], -rho * chi);
            let fe = obj.call(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = combine(&centroid, &pts[n], -rho * gamma);
            let fc = obj.call(&xc);
            (xc, fc)
        } else {
            let xc = combine(&centroid, &pts[n], gamma);
            let fc = obj.call(&xc);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=n {
            pts[i] = combine(&best, &pts[i], shrink);
            vals[i] = obj.call(&pts[i]);
        }
    }
}
