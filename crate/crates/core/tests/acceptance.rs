//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p tets-core --test acceptance` (release-level optimisation
//! is configured for the test profile; the whole run takes a few minutes).

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use tets::censored_gaussian::clipped_variance;
use tets::simulation::fixtures::{bundled_m5_like, bundled_trend_seasonal, m5_like_demand, TREND_SEASONAL_SEASON, TREND_SEASONAL_SPLIT};
use tets::simulation::MonteCarloConfig;
use tets::simulation::newsvendor::{run_newsvendor, Forecaster, NewsvendorConfig, NewsvendorRun, SPIRAL_MARGIN, SPIRAL_WINDOW};
use tets::simulation::table1::{run_table1, Method, Table1Config};
use tets::simulation::trend_seasonal::run_trend_seasonal_case;
use tets::{
    akf_filter, censored_moments, fit, forecast, kernel_values, plain_filter, tobit_filter, truncated_moments, Family,
    FitOptions, InitPolicy, InnovationsModel, ModelSpec, Series, SmoothingParams,
};

type Outcome = Result<(bool, String), String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let config = Table1Config {
        base: MonteCarloConfig {
            n_series: 1000,
            n_obs: 150,
            horizon: 10,
            ..MonteCarloConfig::default()
        },
        levels: vec![f64::INFINITY, 120.0, 100.0, 90.0],
    };
    let table = run_table1(&config).map_err(|e| e.to_string())?;
    let row = |level: f64, m: Method| table.row(level, m).ok_or(format!("missing row {level} {}", m.as_str()));

    let mut ok = true;
    let mut detail = Vec::new();
    for &level in &config.levels {
        let t = row(level, Method::Tets)?;
        ok &= within(t.rmse, 19.6, 0.4) && t.bias.abs() <= 0.5;
        detail.push(format!("TETS@{level}: rmse {:.3} bias {:.3}", t.rmse, t.bias));
    }
    for (level, want, tol) in [(120.0, -1.6, 0.8), (100.0, -7.9, 0.8), (90.0, -13.9, 1.0)] {
        let e = row(level, Method::Ets)?;
        ok &= within(e.bias, want, tol);
        detail.push(format!("ETS@{level}: bias {:.3}", e.bias));
    }
    let e100 = row(100.0, Method::Ets)?;
    ok &= within(e100.sd_bias, -8.3, 1.0);
    detail.push(format!("ETS@100 sd-bias {:.3}", e100.sd_bias));
    Ok((ok, detail.join("; ")))
}

// ---------------------------------------------------------------- 2

fn random_model(r: &mut ChaCha8Rng) -> InnovationsModel<f64> {
    let alpha = r.random_range(0.01..0.99);
    let (family, season, params) = match r.random_range(0..3) {
        0 => (Family::Ann, None, SmoothingParams::ann(alpha)),
        1 => (Family::Aan, None, SmoothingParams::aan(alpha, r.random_range(0.0..alpha))),
        _ => {
            let m = r.random_range(2..13);
            let gamma = r.random_range(0.0..(1.0 - alpha));
            (Family::Aaa, Some(m), SmoothingParams::aaa(alpha, r.random_range(0.0..alpha), gamma))
        }
    };
    let sigma2 = r.random_range(0.1..400.0);
    InnovationsModel::new(ModelSpec::new(family, season), params, sigma2).expect("valid random model")
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let model = random_model(&mut r);
        let n = r.random_range(5..200);
        let scale = r.random_range(1.0..100.0);
        let values: Vec<f64> = (0..n).map(|_| scale * normal(&mut r) + 50.0).collect();
        let series = Series::uncensored(&values).map_err(|e| e.to_string())?;
        let x1: Vec<f64> = (0..model.n_states()).map(|_| 10.0 * normal(&mut r)).collect();
        let a = tobit_filter(&model, &series, &x1).map_err(|e| e.to_string())?;
        let b = plain_filter(&model, &series, &x1).map_err(|e| e.to_string())?;
        let mut d = max_diff(&a.innovations, &b.innovations)
            .max(max_diff(&a.predicted_mean, &b.predicted_mean))
            .max(max_diff(&a.initial_state, &b.initial_state))
            .max((a.loglik - b.loglik).abs());
        for (sa, sb) in a.states.iter().zip(&b.states) {
            d = d.max(max_diff(sa, sb));
        }
        for (ka, kb) in a.kernel.iter().zip(&b.kernel) {
            d = d.max(max_diff(&[ka.p_un, ka.p_max, ka.mills, ka.c], &[kb.p_un, kb.p_max, kb.mills, kb.c]));
        }
        if a.states.len() != b.states.len() || a.n_censored != b.n_censored || a.n_degenerate != b.n_degenerate {
            return Ok((false, "trace lengths or counters differ".into()));
        }
        worst = worst.max(d);
    }
    Ok((worst <= 1e-12, format!("200 pairs, max field difference {worst:e}")))
}

// ---------------------------------------------------------------- 3

// 40-digit reference values of phi(z)/Phi(z) and -z phi(z) at z = -6 + 12 i / 19.
const MILLS_GRID: [(f64, f64, f64); 20] = [
    (-6.0, 6.1584826045445989173, 3.6455297098939712922e-8),
    (-5.3684210526315789474, 5.5435734744694463265, 1.1819121106041550367e-6),
    (-4.7368421052631578947, 4.9323413300427650976, 0.000025358301475972015173),
    (-4.1052631578947368421, 4.3260544825979367609, 0.00035861488698834635661),
    (-3.4736842105263157895, 3.7265818903874794037, 0.0033227458734402200477),
    (-2.8421052631578947368, 3.1367499163942880029, 0.019976980781012541088),
    (-2.2105263157894736842, 2.5609394613636601611, 0.076618157251625904421),
    (-1.5789473684210526316, 2.0060727707682634679, 0.18109789694534627253),
    (-0.94736842105263157895, 1.4831464157753867039, 0.24128916328475607725),
    (-0.31578947368421052632, 1.0091922861466786358, 0.11985416834927547201),
    (0.31578947368421052632, 0.60831340858021348155, -0.11985416834927547201),
    (0.94736842105263157895, 0.30749966178344662301, -0.24128916328475607725),
    (1.5789473684210526316, 0.1216505936659155601, -0.18109789694534627253),
    (2.2105263157894736842, 0.035136138980747174092, -0.076618157251625904421),
    (2.8421052631578947368, 0.0070447237427791440786, -0.019976980781012541088),
    (3.4736842105263157895, 0.00095679364658296753044, -0.0033227458734402200477),
    (4.1052631578947368421, 0.000087356672339830400244, -0.00035861488698834635661),
    (4.7368421052631578947, 5.3534250109341083834e-6, -0.000025358301475972015173),
    (5.3684210526315789474, 2.2016010777764996513e-7, -1.1819121106041550367e-6),
    (6.0, 6.0758828558176764452e-9, -3.6455297098939712922e-8),
];

/// Sample mean and variance plus their standard errors.
fn moments_with_se(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for x in xs {
        let d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    let var = m2 / (n - 1.0);
    let m4 = m4 / n;
    (mean, var, (var / n).sqrt(), ((m4 - var * var) / n).sqrt())
}

fn criterion_3() -> Outcome {
    let mut worst_grid = 0.0f64;
    for (i, &(z, mills, c)) in MILLS_GRID.iter().enumerate() {
        let zz = -6.0 + 12.0 * i as f64 / 19.0;
        debug_assert!((zz - z).abs() < 1e-15);
        let k = kernel_values(0.0, 1.0, zz).map_err(|e| e.to_string())?;
        worst_grid = worst_grid.max((k.mills - mills).abs()).max((k.c - c).abs());
    }

    let mut r = rng(3);
    let mut worst_se = 0.0f64;
    let mut draws = vec![0.0; 1_000_000];
    for _ in 0..50 {
        let mu = r.random_range(50.0..150.0);
        let sigma = r.random_range(1.0..30.0);
        let a = mu + sigma * r.random_range(-2.0..2.0);
        for d in draws.iter_mut() {
            *d = mu + sigma * normal(&mut r);
        }
        let kept: Vec<f64> = draws.iter().copied().filter(|&x| x <= a).collect();
        let clipped: Vec<f64> = draws.iter().map(|&x| x.min(a)).collect();
        let (tm, tv, tm_se, tv_se) = moments_with_se(&kept);
        let (cm, cv, cm_se, cv_se) = moments_with_se(&clipped);

        let (t_mean, t_var) = truncated_moments(mu, sigma, a).map_err(|e| e.to_string())?;
        let (c_mean, c_var_trunc) = censored_moments(mu, sigma, a).map_err(|e| e.to_string())?;
        let c_var = clipped_variance(mu, sigma, a).map_err(|e| e.to_string())?;
        for (got, want, se) in [
            (t_mean, tm, tm_se),
            (t_var, tv, tv_se),
            (c_mean, cm, cm_se),
            (c_var_trunc, tv, tv_se),
            (c_var, cv, cv_se),
        ] {
            worst_se = worst_se.max((got - want).abs() / se);
        }
    }
    let ok = worst_grid <= 1e-10 && worst_se <= 4.0;
    Ok((
        ok,
        format!("grid max error {worst_grid:e}; 50 cases x 1e6 draws, worst deviation {worst_se:.2} SE"),
    ))
}

// ---------------------------------------------------------------- 4

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Initial state minimising the sum of squared innovations, and that minimum.
fn least_squares_x1(model: &InnovationsModel<f64>, series: &Series) -> (Vec<f64>, f64) {
    let n = model.n_states();
    let e0 = plain_filter(model, series, &vec![0.0; n]).unwrap().innovations;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut u = vec![0.0; n];
            u[j] = 1.0;
            let e = plain_filter(model, series, &u).unwrap().innovations;
            e.iter().zip(&e0).map(|(a, b)| a - b).collect()
        })
        .collect();
    let ata: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let atb: Vec<f64> = (0..n).map(|i| -cols[i].iter().zip(&e0).map(|(a, b)| a * b).sum::<f64>()).collect();
    let x = solve(ata, atb);
    let sse = plain_filter(model, series, &x).unwrap().innovations.iter().map(|e| e * e).sum();
    (x, sse)
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-9 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

fn local_trend(seed: u64, n: usize, alpha: f64, beta: f64, slope: f64, sigma: f64) -> Vec<f64> {
    let mut r = rng(seed);
    let (mut level, mut slope) = (50.0, slope);
    (0..n)
        .map(|_| {
            let e = sigma * normal(&mut r);
            let y = level + slope + e;
            level += slope + alpha * e;
            slope += beta * e;
            y
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let ann_y = local_trend(41, 150, 0.3, 0.0, 0.0, 5.0);
    let aan_y = local_trend(42, 150, 0.4, 0.1, 0.5, 5.0);
    let ann = Series::uncensored(&ann_y).map_err(|e| e.to_string())?;
    let aan = Series::uncensored(&aan_y).map_err(|e| e.to_string())?;

    let mut worst_x1 = 0.0f64;
    let cases = [
        (ModelSpec::new(Family::Ann, None), &ann, vec![SmoothingParams::ann(0.1), SmoothingParams::ann(0.3), SmoothingParams::ann(0.8)]),
        (
            ModelSpec::new(Family::Aan, None),
            &aan,
            vec![SmoothingParams::aan(0.2, 0.05), SmoothingParams::aan(0.4, 0.1), SmoothingParams::aan(0.7, 0.3)],
        ),
    ];
    for (spec, series, params) in &cases {
        for p in params {
            let model = InnovationsModel::new(*spec, *p, 25.0).map_err(|e| e.to_string())?;
            let akf = akf_filter(&model, series).map_err(|e| e.to_string())?;
            let (ls, _) = least_squares_x1(&model, series);
            worst_x1 = worst_x1.max(max_diff(&akf.x1_hat, &ls));
        }
    }

    // alpha maximising the diffuse likelihood, via the estimator
    let spec = ModelSpec::new(Family::Ann, None);
    let fitted = fit(&ann, spec, &FitOptions::default().with_init(InitPolicy::Diffuse)).map_err(|e| e.to_string())?;
    let alpha_diffuse = fitted.model.params.alpha;
    // alpha of the joint (alpha, x1) Gaussian MLE with sigma^2 concentrated out
    let n = ann.len() as f64;
    let profile = |alpha: f64| {
        let model = InnovationsModel::new(spec, SmoothingParams::ann(alpha), 1.0).unwrap();
        -0.5 * n * (least_squares_x1(&model, &ann).1 / n).ln()
    };
    let alpha_joint = golden_max(profile, 1e-6, 1.0 - 1e-6);
    let gap = (alpha_diffuse - alpha_joint).abs();

    let ok = worst_x1 <= 1e-6 && gap <= 1e-3;
    let mut detail = format!(
        "x1 max |AKF - least squares| {worst_x1:e}; alpha diffuse {alpha_diffuse:.6} vs joint MLE {alpha_joint:.6} (gap {gap:.2e})"
    );
    if !ok {
        // Separate optimiser error from the difference between the two objectives.
        let akf_at = |alpha: f64| {
            let model = InnovationsModel::new(spec, SmoothingParams::ann(alpha), 1.0).unwrap();
            akf_filter(&model, &ann).unwrap()
        };
        let alpha_grid = golden_max(|a| akf_at(a).loglik_diffuse, 1e-6, 1.0 - 1e-6);
        let alpha_stripped = golden_max(
            |a| {
                // sigma2_hat * (n - q) is the minimised sum of squares
                let sse = akf_at(a).sigma2_hat * (n - 1.0);
                -0.5 * n * (sse / n).ln()
            },
            1e-6,
            1.0 - 1e-6,
        );
        detail.push_str(&format!(
            "\n  diagnostic: golden-section maximum of the diffuse likelihood {alpha_grid:.6}; \
             with ln|S_n| dropped and n in place of n-q it moves to {alpha_stripped:.6}"
        ));
    }
    Ok((ok, detail))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let mut worst_closed = 0.0f64;
    for &alpha in &[0.0, 0.05, 0.3, 0.6, 0.95, 1.0] {
        for &sigma2 in &[1.0, 17.5, 400.0] {
            let model = InnovationsModel::new(ModelSpec::new(Family::Ann, None), SmoothingParams::ann(alpha), sigma2)
                .map_err(|e| e.to_string())?;
            let fc = forecast(&model, &[100.0], 14, &[]).map_err(|e| e.to_string())?;
            for j in 1..=14 {
                let closed = sigma2 * (1.0 + (j as f64 - 1.0) * alpha * alpha);
                worst_closed = worst_closed.max((fc.variance[j - 1] - closed).abs() / closed);
            }
        }
    }

    let mut worst_mc = 0.0f64;
    let models = [
        (ModelSpec::new(Family::Ann, None), SmoothingParams::ann(0.4), vec![100.0]),
        (ModelSpec::new(Family::Aan, None), SmoothingParams::aan(0.3, 0.1), vec![100.0, 1.0]),
        (ModelSpec::new(Family::Aaa, Some(4)), SmoothingParams::aaa(0.3, 0.05, 0.2), vec![100.0, 1.0, 3.0, -1.0, -2.0, 0.0]),
    ];
    let mut r = rng(5);
    let paths = 100_000;
    for (spec, params, x0) in &models {
        let model = InnovationsModel::new(*spec, *params, 16.0).map_err(|e| e.to_string())?;
        let h = 14;
        let fc = forecast(&model, x0, h, &[]).map_err(|e| e.to_string())?;
        let mut sums = vec![0.0; h];
        let mut sq = vec![0.0; h];
        let mut x = vec![0.0; x0.len()];
        let mut next = vec![0.0; x0.len()];
        for _ in 0..paths {
            x.copy_from_slice(x0);
            for j in 0..h {
                let e = 4.0 * normal(&mut r);
                let y: f64 = model.w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + e;
                sums[j] += y;
                sq[j] += y * y;
                model.transition_into(&x, &mut next);
                for (k, v) in next.iter().enumerate() {
                    x[k] = v + model.g[k] * e;
                }
            }
        }
        for j in 0..h {
            let m = sums[j] / paths as f64;
            let v = (sq[j] - paths as f64 * m * m) / (paths as f64 - 1.0);
            worst_mc = worst_mc.max((v - fc.variance[j]).abs() / fc.variance[j]);
        }
    }
    Ok((
        worst_closed <= 1e-12 && worst_mc <= 0.03,
        format!("closed form max rel error {worst_closed:e}; Monte Carlo (1e5 paths, ANN/AAN/AAA) max rel error {:.2}%", 100.0 * worst_mc),
    ))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let f = bundled_trend_seasonal().map_err(|e| e.to_string())?;
    let rep = run_trend_seasonal_case(&f.values, &f.bound, TREND_SEASONAL_SPLIT, TREND_SEASONAL_SEASON)
        .map_err(|e| e.to_string())?;
    let ok = rep.tets.bias.abs() < rep.ets.bias.abs() && rep.tets.rmse < rep.ets.rmse;
    Ok((
        ok,
        format!(
            "{} censored in-sample; ETS rmse {:.4} me {:.4}; TETS rmse {:.4} me {:.4}",
            rep.n_censored, rep.ets.rmse, rep.ets.bias, rep.tets.rmse, rep.tets.bias
        ),
    ))
}

// ---------------------------------------------------------------- 7, 8

fn newsvendor_pair(demand: &[f64], csl: f64, seed: u64) -> Result<(NewsvendorRun, NewsvendorRun), String> {
    let runs: Vec<_> = [Forecaster::Ets, Forecaster::Tets]
        .par_iter()
        .map(|&f| {
            let mut cfg = NewsvendorConfig::new(demand.to_vec(), csl, f);
            cfg.seed = seed;
            run_newsvendor(&cfg)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut it = runs.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

fn criterion_7() -> Outcome {
    let demand = bundled_m5_like().map_err(|e| e.to_string())?.values;
    let mut ok = true;
    let mut detail = Vec::new();
    let mut gaps = Vec::new();
    for csl in [0.80, 0.90, 0.95, 0.99] {
        let (e, t) = newsvendor_pair(&demand, csl, 0)?;
        let (e, t) = (&e.report, &t.report);
        ok &= t.achieved_csl >= e.achieved_csl && t.lost_sales <= e.lost_sales && t.excess_stock >= e.excess_stock;
        gaps.push((t.achieved_csl - e.achieved_csl).abs());
        detail.push(format!(
            "{:.0}%: CSL {:.3}/{:.3} lost {:.0}/{:.0} excess {:.0}/{:.0}",
            100.0 * csl,
            e.achieved_csl,
            t.achieved_csl,
            e.lost_sales,
            t.lost_sales,
            e.excess_stock,
            t.excess_stock
        ));
    }
    ok &= gaps[3] < gaps[0];
    Ok((ok, format!("ETS/TETS {}", detail.join("; "))))
}

/// Probability that a calibrated forecaster (iid coverage with probability `p`)
/// trips the detector at least once over `periods` loop periods.
fn detector_false_alarm_rate(p: f64, target: f64, periods: usize, runs: usize) -> f64 {
    let mut r = rng(8);
    let mut alarms = 0;
    for _ in 0..runs {
        let mut window = std::collections::VecDeque::with_capacity(SPIRAL_WINDOW);
        let mut covered = 0usize;
        for _ in 0..periods {
            if window.len() == SPIRAL_WINDOW {
                if window.pop_front() == Some(true) {
                    covered -= 1;
                }
            }
            let c = r.random::<f64>() < p;
            covered += c as usize;
            window.push_back(c);
            if window.len() == SPIRAL_WINDOW && (covered as f64 / SPIRAL_WINDOW as f64) < target - SPIRAL_MARGIN {
                alarms += 1;
                break;
            }
        }
    }
    alarms as f64 / runs as f64
}

fn criterion_8() -> Outcome {
    let target = 0.70;
    let mut ets_flags = 0;
    let mut tets_flags = 0;
    let mut lines = Vec::new();
    let mut periods = 0;
    let mut tets_csl = 0.0;
    for seed in 0..10u64 {
        let demand = m5_like_demand(seed);
        let (e, t) = newsvendor_pair(&demand, target, seed)?;
        periods = t.log.len();
        ets_flags += e.spiral_down as usize;
        tets_flags += t.spiral_down as usize;
        tets_csl += t.report.achieved_csl / 10.0;
        let at = |r: &NewsvendorRun| r.spiral_at.map_or("-".to_string(), |t| t.to_string());
        lines.push(format!(
            "    seed {seed}: ETS flag {} at {} csl {:.3} | TETS flag {} at {} csl {:.3}",
            e.spiral_down,
            at(&e),
            e.report.achieved_csl,
            t.spiral_down,
            at(&t),
            t.report.achieved_csl
        ));
    }
    let ok = ets_flags >= 1 && tets_flags == 0;
    let mut detail = format!("ETS flagged in {ets_flags}/10 seeds, TETS in {tets_flags}/10");
    if !ok {
        let one = detector_false_alarm_rate(target, target, periods, 20_000);
        let at_achieved = detector_false_alarm_rate(tets_csl, target, periods, 20_000);
        detail.push_str("\n  diagnostic:\n");
        detail.push_str(&lines.join("\n"));
        detail.push_str(&format!(
            "\n    a perfectly calibrated forecaster (iid coverage 0.70 over {periods} periods) trips the detector in {:.1}% of runs, \
             so at least one of 10 seeds flags with probability {:.1}%;\n    at the mean TETS coverage {:.3} that probability is {:.1}%",
            100.0 * one,
            100.0 * (1.0 - (1.0 - one).powi(10)),
            tets_csl,
            100.0 * (1.0 - (1.0 - at_achieved).powi(10)),
        ));
    }
    Ok((ok, detail))
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    let config = Table1Config {
        base: MonteCarloConfig {
            n_series: 40,
            seed: 99,
            ..MonteCarloConfig::default()
        },
        levels: vec![f64::INFINITY, 100.0],
    };
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_table1(&config))
            .map(|t| (t.records_csv(), t.summary_csv()))
            .map_err(|e| e.to_string())
    };
    let t1 = in_pool(1)?;
    let t2 = in_pool(3)?;
    let t3 = in_pool(3)?;

    let f = bundled_trend_seasonal().map_err(|e| e.to_string())?;
    let ts = || {
        run_trend_seasonal_case(&f.values, &f.bound, TREND_SEASONAL_SPLIT, TREND_SEASONAL_SEASON)
            .map(|r| r.forecast_csv())
            .map_err(|e| e.to_string())
    };
    let (ts1, ts2) = (ts()?, ts()?);

    let nv = || {
        let mut cfg = NewsvendorConfig::new(m5_like_demand(4), 0.9, Forecaster::Tets);
        cfg.seed = 4;
        run_newsvendor(&cfg)
            .map(|r| r.log_csv() + &r.summary_row())
            .map_err(|e| e.to_string())
    };
    let (nv1, nv2) = (nv()?, nv()?);

    let checks = [("table1", t1 == t2 && t2 == t3), ("trend_seasonal", ts1 == ts2), ("newsvendor", nv1 == nv2)];
    let ok = checks.iter().all(|c| c.1);
    let detail = checks
        .iter()
        .map(|(name, same)| format!("{name} {}", if *same { "identical" } else { "DIFFERS" }))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, detail))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !ok as usize;
        println!(
            "criterion {id}: {} ({:.1}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
