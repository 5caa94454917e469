//! CSV ingestion and output, plus the flat `key = value` run configuration.
//!
//! Input columns: `timestamp,value[,bound]`. A blank bound or `inf` means the
//! observation cannot be censored. Any failure names the offending line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::forecasting::ForecastResult;
use crate::series::{validate_series, CensoredSeries};

/// Formats a number so that it parses back to the same value (`inf`, `-inf`, `NaN` included).
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        // shortest representation that parses back exactly
        format!("{v:?}")
    }
}

fn parse_num(s: &str, line: usize, column: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    t.parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse {column} `{t}`")))
}

/// A series as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub timestamps: Vec<String>,
    pub values: Vec<f64>,
    /// `+inf` where no limit applies.
    pub bound: Vec<f64>,
    /// Whether the file had a bound column.
    pub has_bound: bool,
}

impl SeriesFile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Validated series; values above their bound are an error.
    pub fn to_series(&self) -> Result<CensoredSeries<f64>> {
        validate_series(&self.values, &self.bound)
    }

    /// Treats `values` as latent demand and clips them at the bound.
    pub fn to_clipped_series(&self) -> Result<CensoredSeries<f64>> {
        CensoredSeries::from_latent(&self.values, &self.bound)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.has_bound { "timestamp,value,bound\n" } else { "timestamp,value\n" });
        for i in 0..self.len() {
            if self.has_bound {
                let b = if self.bound[i].is_finite() { fmt_num(self.bound[i]) } else { String::new() };
                let _ = writeln!(out, "{},{},{}", self.timestamps[i], fmt_num(self.values[i]), b);
            } else {
                let _ = writeln!(out, "{},{}", self.timestamps[i], fmt_num(self.values[i]));
            }
        }
        out
    }
}

/// Parses series CSV text.
pub fn read_series_csv(text: &str) -> Result<SeriesFile> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("line 1: {e}")))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let value_col = col("value").ok_or_else(|| Error::Parse("line 1: missing `value` column".into()))?;
    let time_col = col("timestamp");
    let bound_col = col("bound");

    let mut file = SeriesFile {
        timestamps: Vec::new(),
        values: Vec::new(),
        bound: Vec::new(),
        has_bound: bound_col.is_some(),
    };
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        let raw = record
            .get(value_col)
            .ok_or_else(|| Error::Parse(format!("line {line}: missing value")))?;
        if raw.is_empty() {
            return Err(Error::Parse(format!("line {line}: missing value")));
        }
        let value = parse_num(raw, line, "value")?;
        if !value.is_finite() {
            return Err(Error::Parse(format!("line {line}: value must be finite")));
        }
        let bound = match bound_col.and_then(|c| record.get(c)) {
            None | Some("") => f64::INFINITY,
            Some(b) => parse_num(b, line, "bound")?,
        };
        if bound.is_nan() || bound == f64::NEG_INFINITY {
            return Err(Error::Parse(format!("line {line}: invalid bound")));
        }
        let stamp = time_col
            .and_then(|c| record.get(c))
            .map(str::to_string)
            .unwrap_or_else(|| (i + 1).to_string());
        file.timestamps.push(stamp);
        file.values.push(value);
        file.bound.push(bound);
    }
    if file.is_empty() {
        return Err(Error::Parse("no observations".into()));
    }
    Ok(file)
}

pub fn read_series_file(path: &Path) -> Result<SeriesFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_series_csv(&text)
}

/// `step,mean,variance,lo_<level>,hi_<level>,...`
pub fn forecast_csv(fc: &ForecastResult<f64>) -> String {
    let mut out = String::from("step,mean,variance");
    for pi in &fc.intervals {
        let _ = write!(out, ",lo_{0},hi_{0}", fmt_num(pi.level));
    }
    out.push('\n');
    for j in 0..fc.horizon {
        let _ = write!(out, "{},{},{}", j + 1, fmt_num(fc.mean[j]), fmt_num(fc.variance[j]));
        for pi in &fc.intervals {
            let _ = write!(out, ",{},{}", fmt_num(pi.lower[j]), fmt_num(pi.upper[j]));
        }
        out.push('\n');
    }
    out
}

/// Writes `contents` to `path` via a temporary sibling, so a failed run leaves nothing behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(format!("{}: {e}", path.display()))
    })
}

/// Flat run configuration: one `key = value` per line, `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<()> {
        let value = value.to_string();
        if key.is_empty() || key.contains(['=', '\n', '#']) || key.trim() != key {
            return Err(Error::InvalidInput(format!("bad config key `{key}`")));
        }
        if value.contains('\n') || value.trim() != value {
            return Err(Error::InvalidInput(format!("bad config value for `{key}`")));
        }
        self.entries.insert(key.to_string(), value);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`", i + 1)))?;
            cfg.set(k.trim(), v.trim())
                .map_err(|e| Error::Parse(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
