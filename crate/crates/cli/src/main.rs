//! `tets` command-line front end.
//!
//! Every invocation is first turned into a flat [`RunConfig`]; the config is
//! what gets executed, and it is written next to the output so that
//! `tets replay <file>` reruns the exact same command.

mod exec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tets::io::RunConfig;

use exec::{execute, CliError};

#[derive(Parser, Debug)]
#[command(name = "tets", version, about = "Exponential smoothing for demand censored from above")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// ANN, AAN or AAA
    #[arg(long, default_value = "ANN")]
    family: String,
    /// Season length (AAA only)
    #[arg(long)]
    season: Option<usize>,
    /// Comma-separated candidate list, e.g. "ANN,AAN,AAA(12)"; overrides --family
    #[arg(long)]
    candidates: Option<String>,
    #[arg(long, default_value = "aic")]
    criterion: String,
    /// auto, diffuse or deterministic
    #[arg(long, default_value = "auto")]
    init: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate a model and report parameters, likelihood and criteria
    Fit {
        /// CSV with timestamp,value[,bound]
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// JSON report path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point forecasts, variances and prediction intervals
    Forecast {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Model JSON written by `fit`; otherwise the model is fitted on --input
        #[arg(long)]
        model_file: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        horizon: usize,
        /// Interval levels, e.g. "0.8,0.95"
        #[arg(long, default_value = "")]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a case study: table1, trend_seasonal or newsvendor
    Simulate {
        case: String,
        /// Master seed (table1) or demand realization (newsvendor without --input)
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Series CSV (trend_seasonal, newsvendor); defaults to the bundled fixture
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n_series: Option<usize>,
        #[arg(long)]
        n_obs: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
        /// table1 censoring levels, e.g. "inf,120,100,90"
        #[arg(long)]
        censor_levels: Option<String>,
        #[arg(long)]
        season: Option<usize>,
        #[arg(long)]
        split: Option<usize>,
        /// One or more target service levels, e.g. "0.8,0.95"
        #[arg(long)]
        target_csl: Option<String>,
        #[arg(long)]
        refit_every: Option<usize>,
        #[arg(long)]
        warmup: Option<usize>,
        /// ets, tets or both
        #[arg(long)]
        forecaster: Option<String>,
    },
    /// Re-execute a saved run configuration
    Replay {
        config: PathBuf,
        /// Write to this path instead of the one recorded in the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn set_opt<V: ToString>(cfg: &mut RunConfig, key: &str, v: Option<V>) -> Result<(), CliError> {
    if let Some(v) = v {
        cfg.set(key, v).map_err(CliError::from)?;
    }
    Ok(())
}

fn path_str(p: PathBuf) -> String {
    p.to_string_lossy().into_owned()
}

fn model_config(cfg: &mut RunConfig, m: ModelArgs) -> Result<(), CliError> {
    cfg.set("family", m.family)?;
    set_opt(cfg, "season", m.season)?;
    set_opt(cfg, "candidates", m.candidates)?;
    cfg.set("criterion", m.criterion)?;
    cfg.set("init", m.init)?;
    Ok(())
}

fn to_config(command: Command) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::new();
    match command {
        Command::Fit { input, model, out } => {
            cfg.set("command", "fit")?;
            cfg.set("input", path_str(input))?;
            model_config(&mut cfg, model)?;
            set_opt(&mut cfg, "out", out.map(path_str))?;
        }
        Command::Forecast {
            input,
            model_file,
            model,
            horizon,
            levels,
            out,
        } => {
            cfg.set("command", "forecast")?;
            set_opt(&mut cfg, "input", input.map(path_str))?;
            set_opt(&mut cfg, "model_file", model_file.map(path_str))?;
            model_config(&mut cfg, model)?;
            cfg.set("horizon", horizon)?;
            cfg.set("levels", levels)?;
            set_opt(&mut cfg, "out", out.map(path_str))?;
        }
        Command::Simulate {
            case,
            seed,
            out,
            input,
            n_series,
            n_obs,
            horizon,
            censor_levels,
            season,
            split,
            target_csl,
            refit_every,
            warmup,
            forecaster,
        } => {
            cfg.set("command", "simulate")?;
            cfg.set("case", case)?;
            set_opt(&mut cfg, "seed", seed)?;
            set_opt(&mut cfg, "out", out.map(path_str))?;
            set_opt(&mut cfg, "input", input.map(path_str))?;
            set_opt(&mut cfg, "n_series", n_series)?;
            set_opt(&mut cfg, "n_obs", n_obs)?;
            set_opt(&mut cfg, "horizon", horizon)?;
            set_opt(&mut cfg, "censor_levels", censor_levels)?;
            set_opt(&mut cfg, "season", season)?;
            set_opt(&mut cfg, "split", split)?;
            set_opt(&mut cfg, "target_csl", target_csl)?;
            set_opt(&mut cfg, "refit_every", refit_every)?;
            set_opt(&mut cfg, "warmup", warmup)?;
            set_opt(&mut cfg, "forecaster", forecaster)?;
        }
        Command::Replay { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Parse(format!("{}: {e}", config.display())))?;
            cfg = RunConfig::parse(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            if let Some(out) = out {
                cfg.set("out", path_str(out))?;
            }
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = to_config(cli.command).and_then(|cfg| execute(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
