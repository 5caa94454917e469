use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tets::io::{fmt_num, forecast_csv, read_series_file, write_atomic, RunConfig, SeriesFile};
use tets::simulation::fixtures::{self, TREND_SEASONAL_SEASON, TREND_SEASONAL_SPLIT};
use tets::simulation::{
    run_newsvendor, run_table1, run_trend_seasonal_case, Forecaster, MonteCarloConfig, NewsvendorConfig,
    NewsvendorRun, Table1Config,
};
use tets::{
    build_model, fit, forecast, select_model, Criterion, Error, Family, Fit, FitOptions, InitPolicy, ModelSpec,
    SmoothingParams,
};

pub const DEFAULT_TABLE1_SEED: u64 = 20_240_601;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidInput(_) => CliError::Usage(msg),
            Error::Parse(_) | Error::Io(_) | Error::AboveBound { .. } | Error::DimensionMismatch { .. } => {
                CliError::Parse(msg)
            }
            Error::NonFinite(_)
            | Error::SeriesTooShort { .. }
            | Error::AllMassCensored(_)
            | Error::Singular(_)
            | Error::NoCandidateFitted => CliError::Numeric(msg),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Typed access to a run configuration.
struct Opts<'a>(&'a RunConfig);

impl Opts<'_> {
    fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.str(key)
            .ok_or_else(|| CliError::Usage(format!("missing required option `{key}`")))
    }

    fn parse<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>> {
        match self.str(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("invalid value `{s}` for `{key}`"))),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.str(key).map(PathBuf::from)
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.to_ascii_lowercase().as_str() {
            "inf" | "none" => Ok(f64::INFINITY),
            _ => t
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid {what} `{t}`"))),
        })
        .collect()
}

/// Probabilities given either as fractions or as percentages.
fn parse_probabilities(s: &str, what: &str) -> Result<Vec<f64>> {
    parse_list(s, what)?
        .into_iter()
        .map(|p| {
            let p = if p > 1.0 && p < 100.0 { p / 100.0 } else { p };
            if p > 0.0 && p < 1.0 {
                Ok(p)
            } else {
                Err(CliError::Usage(format!("{what} {p} outside (0, 1)")))
            }
        })
        .collect()
}

pub fn execute(cfg: &RunConfig) -> Result<()> {
    let o = Opts(cfg);
    match o.required("command")? {
        "fit" => cmd_fit(cfg),
        "forecast" => cmd_forecast(cfg),
        "simulate" => cmd_simulate(cfg),
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

/// Output files are collected first and written only once everything succeeded.
struct Outputs {
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, path: PathBuf, contents: String) {
        self.files.push((path, contents));
    }

    fn commit(self) -> Result<()> {
        for (path, contents) in &self.files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Parse(format!("{}: {e}", dir.display())))?;
            }
            write_atomic(path, contents)?;
        }
        Ok(())
    }
}

fn sibling_config(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".cfg");
    PathBuf::from(s)
}

fn load_series(o: &Opts<'_>) -> Result<SeriesFile> {
    let path = o
        .path("input")
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    Ok(read_series_file(&path)?)
}

fn model_specs(o: &Opts<'_>) -> Result<Vec<ModelSpec>> {
    let season = o.parse::<usize>("season")?;
    if let Some(list) = o.str("candidates") {
        return list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                // a bare family name picks up --season
                let spec = match s.parse::<Family>() {
                    Ok(family) => ModelSpec::new(family, season),
                    Err(_) => s.parse::<ModelSpec>()?,
                };
                spec.validate()?;
                Ok(spec)
            })
            .collect();
    }
    let family: Family = o.str("family").unwrap_or("ANN").parse()?;
    let spec = ModelSpec::new(family, season);
    spec.validate()?;
    Ok(vec![spec])
}

fn fit_from_options(o: &Opts<'_>, file: &SeriesFile) -> Result<Fit> {
    let series = file.to_series()?;
    let criterion: Criterion = o.str("criterion").unwrap_or("aic").parse()?;
    let mut init: InitPolicy = o.str("init").unwrap_or("auto").parse()?;
    if init == InitPolicy::Auto && series.has_finite_bound() {
        init = InitPolicy::Deterministic;
    }
    let options = FitOptions::default().with_init(init);
    let specs = model_specs(o)?;
    let fitted = if specs.len() == 1 {
        fit(&series, specs[0], &options)?
    } else {
        select_model(&series, &specs, criterion, &options)?
    };
    Ok(fitted)
}

fn fit_json(f: &Fit) -> Value {
    let names = f.model.spec.param_names();
    let params: serde_json::Map<String, Value> = names
        .iter()
        .zip(f.model.params.to_vec())
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    json!({
        "model": f.model.spec.to_string(),
        "family": f.model.spec.family.as_str(),
        "season": f.model.spec.season_length,
        "params": params,
        "sigma": f.sigma(),
        "sigma2": f.model.sigma2,
        "loglik": f.loglik,
        "aic": f.aic,
        "bic": f.bic,
        "n_params": f.n_params,
        "n_obs": f.n_obs,
        "n_censored": f.n_censored,
        "init_mode": f.init_mode.to_string(),
        "converged": f.converged,
        "n_evals": f.n_evals,
        "at_boundary": f.at_boundary,
        "x1": f.x1,
        "final_state": f.final_state,
    })
}

fn fit_table(f: &Fit) -> String {
    let mut out = String::new();
    let mut row = |k: &str, v: String| out.push_str(&format!("{k:<12} {v}\n"));
    row("model", f.model.spec.to_string());
    row("init_mode", f.init_mode.to_string());
    for (name, v) in f.model.spec.param_names().iter().zip(f.model.params.to_vec()) {
        row(name, fmt_num(v));
    }
    row("sigma", fmt_num(f.sigma()));
    row("loglik", fmt_num(f.loglik));
    row("aic", fmt_num(f.aic));
    row("bic", fmt_num(f.bic));
    row("n_obs", f.n_obs.to_string());
    row("n_censored", f.n_censored.to_string());
    row("x1", f.x1.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" "));
    row("converged", f.converged.to_string());
    if !f.at_boundary.is_empty() {
        row("at_boundary", f.at_boundary.join(" "));
    }
    out
}

fn cmd_fit(cfg: &RunConfig) -> Result<()> {
    let o = Opts(cfg);
    let file = load_series(&o)?;
    let fitted = fit_from_options(&o, &file)?;
    let mut outputs = Outputs::new();
    if let Some(out) = o.path("out") {
        let text = serde_json::to_string_pretty(&fit_json(&fitted)).expect("json values serialize");
        outputs.add(sibling_config(&out), cfg.to_text());
        outputs.add(out, text + "\n");
    }
    outputs.commit()?;
    print!("{}", fit_table(&fitted));
    Ok(())
}

fn json_field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| CliError::Parse(format!("model file: missing `{key}`")))
}

fn json_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| CliError::Parse(format!("model file: `{what}` is not a number")))
}

fn json_vec(v: &Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| CliError::Parse(format!("model file: `{what}` is not an array")))?
        .iter()
        .map(|x| json_f64(x, what))
        .collect()
}

/// Model and forecast origin from a JSON report written by `fit`.
fn load_model(path: &Path) -> Result<(tets::Model, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let family: Family = json_field(&v, "family")?
        .as_str()
        .ok_or_else(|| CliError::Parse("model file: `family` is not a string".into()))?
        .parse()
        .map_err(|e: Error| CliError::Parse(e.to_string()))?;
    let season = json_field(&v, "season")?.as_u64().map(|s| s as usize);
    let spec = ModelSpec::new(family, season);
    let params_obj = json_field(&v, "params")?;
    let params: Vec<f64> = spec
        .param_names()
        .iter()
        .map(|n| json_f64(json_field(params_obj, n)?, n))
        .collect::<Result<_>>()?;
    let sigma2 = json_f64(json_field(&v, "sigma2")?, "sigma2")?;
    let state = json_vec(json_field(&v, "final_state")?, "final_state")?;
    let model = build_model(family, season, SmoothingParams::from_slice(family, &params)?, sigma2)
        .map_err(|e| CliError::Parse(format!("model file: {e}")))?;
    Ok((model, state))
}

fn cmd_forecast(cfg: &RunConfig) -> Result<()> {
    let o = Opts(cfg);
    let horizon: usize = o
        .parse("horizon")?
        .ok_or_else(|| CliError::Usage("--horizon is required".into()))?;
    if horizon == 0 {
        return Err(CliError::Usage("--horizon must be at least 1".into()));
    }
    let levels = parse_probabilities(o.str("levels").unwrap_or(""), "interval level")?;
    let (model, origin) = match o.path("model_file") {
        Some(p) => load_model(&p)?,
        None => {
            let fitted = fit_from_options(&o, &load_series(&o)?)?;
            (fitted.model.clone(), fitted.final_state.clone())
        }
    };
    let fc = forecast(&model, &origin, horizon, &levels)?;
    let text = forecast_csv(&fc);
    match o.path("out") {
        Some(out) => {
            let mut outputs = Outputs::new();
            outputs.add(sibling_config(&out), cfg.to_text());
            outputs.add(out, text);
            outputs.commit()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    let o = Opts(cfg);
    let out_dir = o.path("out");
    let mut outputs = Outputs::new();
    let summary = match o.required("case")? {
        "table1" => simulate_table1(&o, out_dir.as_deref(), &mut outputs)?,
        "trend_seasonal" => simulate_trend_seasonal(&o, out_dir.as_deref(), &mut outputs)?,
        "newsvendor" => simulate_newsvendor(&o, out_dir.as_deref(), &mut outputs)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown case `{other}` (expected table1, trend_seasonal or newsvendor)"
            )))
        }
    };
    if let Some(dir) = &out_dir {
        outputs.add(dir.join("summary.csv"), summary.clone());
        outputs.add(dir.join("run.cfg"), cfg.to_text());
    }
    outputs.commit()?;
    print!("{summary}");
    Ok(())
}

fn simulate_table1(o: &Opts<'_>, out: Option<&Path>, outputs: &mut Outputs) -> Result<String> {
    let defaults = MonteCarloConfig::default();
    let base = MonteCarloConfig {
        n_series: o.parse("n_series")?.unwrap_or(defaults.n_series),
        n_obs: o.parse("n_obs")?.unwrap_or(defaults.n_obs),
        horizon: o.parse("horizon")?.unwrap_or(defaults.horizon),
        seed: o.parse("seed")?.unwrap_or(DEFAULT_TABLE1_SEED),
        ..defaults
    };
    let mut config = Table1Config {
        base,
        ..Table1Config::default()
    };
    if let Some(levels) = o.str("censor_levels") {
        config.levels = parse_list(levels, "censoring level")?;
    }
    let table = run_table1(&config)?;
    if let Some(dir) = out {
        outputs.add(dir.join("replicates.csv"), table.records_csv());
    }
    Ok(table.summary_csv())
}

fn simulate_trend_seasonal(o: &Opts<'_>, out: Option<&Path>, outputs: &mut Outputs) -> Result<String> {
    let file = match o.path("input") {
        Some(p) => read_series_file(&p)?,
        None => fixtures::bundled_trend_seasonal()?,
    };
    let split = o.parse("split")?.unwrap_or(TREND_SEASONAL_SPLIT);
    let season = o.parse("season")?.unwrap_or(TREND_SEASONAL_SEASON);
    let report = run_trend_seasonal_case(&file.values, &file.bound, split, season)?;
    if let Some(dir) = out {
        outputs.add(dir.join("forecasts.csv"), report.forecast_csv());
    }
    let mut summary = String::from("method,rmse,me,sigma,init_mode,n_insample,n_censored\n");
    for (name, r) in [("ETS", &report.ets), ("TETS", &report.tets)] {
        summary.push_str(&format!(
            "{name},{},{},{},{},{},{}\n",
            fmt_num(r.rmse),
            fmt_num(r.bias),
            fmt_num(r.sigma),
            r.init_mode,
            report.n_insample,
            report.n_censored
        ));
    }
    Ok(summary)
}

fn simulate_newsvendor(o: &Opts<'_>, out: Option<&Path>, outputs: &mut Outputs) -> Result<String> {
    let demand = match o.path("input") {
        Some(p) => read_series_file(&p)?.values,
        None => fixtures::m5_like_demand(o.parse("seed")?.unwrap_or(fixtures::M5_LIKE_SEED)),
    };
    let targets = parse_probabilities(o.str("target_csl").unwrap_or("0.95"), "target CSL")?;
    let forecasters = match o.str("forecaster").unwrap_or("both").to_ascii_lowercase().as_str() {
        "both" => vec![Forecaster::Ets, Forecaster::Tets],
        other => vec![other.parse::<Forecaster>()?],
    };
    let season = o.parse("season")?.unwrap_or(fixtures::M5_SEASON);

    let mut summary = String::from(NewsvendorRun::summary_header());
    for &target in &targets {
        for &forecaster in &forecasters {
            let mut config = NewsvendorConfig::new(demand.clone(), target, forecaster);
            config.spec = ModelSpec::new(Family::Aaa, Some(season));
            config.seed = o.parse("seed")?.unwrap_or(fixtures::M5_LIKE_SEED);
            if let Some(k) = o.parse("refit_every")? {
                config.refit_every = k;
            }
            if let Some(w) = o.parse("warmup")? {
                config.warmup = w;
            }
            let run = run_newsvendor(&config)?;
            summary.push_str(&run.summary_row());
            if let Some(dir) = out {
                let name = format!("log_{}_{}.csv", forecaster.as_str().to_ascii_lowercase(), fmt_num(target));
                outputs.add(dir.join(name), run.log_csv());
            }
        }
    }
    Ok(summary)
}
