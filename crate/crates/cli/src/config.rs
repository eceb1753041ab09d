//! `key=value` run configuration, merged from a file and command-line flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use confstress::scenarios::{build_scenario, DEFAULT_ACCEL};
use confstress::Scenario;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Null,
    Orthonormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Accepted keys, in the order they are documented.
pub const KEYS: [&str; 12] =
    ["scenario", "a", "chart", "c1_min", "c1_max", "n1", "c2_min", "c2_max", "n2", "frame", "output", "format"];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("config file {path}, line {line}: {reason}")]
    Syntax { path: String, line: usize, reason: String },
    #[error("cannot read config file {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl ConfigError {
    fn field(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Field { field: field.to_string(), reason: reason.into() }
    }
}

/// Flags of the `run` subcommand; each one overrides the same key from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// Flat key=value file; keys as the flags below, `#` starts a comment
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<String>,
    /// Acceleration parameter (default 1)
    #[arg(long)]
    pub a: Option<String>,
    /// minkowski, rindler or hatted
    #[arg(long)]
    pub chart: Option<String>,
    #[arg(long = "c1-min", alias = "c1_min", allow_hyphen_values = true)]
    pub c1_min: Option<String>,
    #[arg(long = "c1-max", alias = "c1_max", allow_hyphen_values = true)]
    pub c1_max: Option<String>,
    #[arg(long)]
    pub n1: Option<String>,
    #[arg(long = "c2-min", alias = "c2_min", allow_hyphen_values = true)]
    pub c2_min: Option<String>,
    #[arg(long = "c2-max", alias = "c2_max", allow_hyphen_values = true)]
    pub c2_max: Option<String>,
    #[arg(long)]
    pub n2: Option<String>,
    /// null or orthonormal
    #[arg(long)]
    pub frame: Option<String>,
    /// Output file; standard output when absent or `-`
    #[arg(long)]
    pub output: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
}

impl RunFlags {
    fn pairs(&self) -> [(&'static str, &Option<String>); 12] {
        [
            ("scenario", &self.scenario),
            ("a", &self.a),
            ("chart", &self.chart),
            ("c1_min", &self.c1_min),
            ("c1_max", &self.c1_max),
            ("n1", &self.n1),
            ("c2_min", &self.c2_min),
            ("c2_max", &self.c2_max),
            ("n2", &self.n2),
            ("frame", &self.frame),
            ("output", &self.output),
            ("format", &self.format),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: String,
    pub a: f64,
    pub chart: String,
    pub c1_min: f64,
    pub c1_max: f64,
    pub n1: usize,
    pub c2_min: f64,
    pub c2_max: f64,
    pub n2: usize,
    pub frame: Frame,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Parse `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str, path: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: String| ConfigError::Syntax { path: path.to_string(), line: i + 1, reason };
        let (k, v) = line.split_once('=').ok_or_else(|| syntax(format!("expected key=value, got `{line}`")))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::field(&key, "unknown key"));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(syntax(format!("key `{key}` given twice")));
        }
    }
    Ok(map)
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, ConfigError> {
    map.get(key)
        .map(|s| match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(ConfigError::field(key, format!("`{s}` is not a finite number"))),
        })
        .transpose()
}

fn required(map: &BTreeMap<String, String>, key: &str) -> Result<f64, ConfigError> {
    number(map, key)?.ok_or_else(|| ConfigError::field(key, "missing"))
}

fn count(map: &BTreeMap<String, String>, key: &str) -> Result<usize, ConfigError> {
    let s = map.get(key).ok_or_else(|| ConfigError::field(key, "missing"))?;
    let n: usize = s.parse().map_err(|_| ConfigError::field(key, format!("`{s}` is not a point count")))?;
    if n < 2 {
        return Err(ConfigError::field(key, format!("needs at least 2 points, got {n}")));
    }
    Ok(n)
}

fn choice<T: ValueEnum>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, ConfigError> {
    match map.get(key) {
        None => Ok(default),
        Some(s) => T::from_str(s, true).map_err(|_| {
            let allowed: Vec<String> =
                T::value_variants().iter().filter_map(|v| v.to_possible_value()).map(|p| p.get_name().to_string()).collect();
            ConfigError::field(key, format!("`{s}` is not one of {}", allowed.join(", ")))
        }),
    }
}

impl RunConfig {
    /// Merge the config file (if any) with flags, flags winning, and validate.
    pub fn resolve(flags: &RunFlags) -> Result<RunConfig, ConfigError> {
        let mut map = match &flags.config {
            Some(path) => {
                let shown = path.display().to_string();
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
                parse_key_values(&text, &shown)?
            }
            None => BTreeMap::new(),
        };
        for (key, value) in flags.pairs() {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
        let scenario = map.get("scenario").cloned().ok_or_else(|| ConfigError::field("scenario", "missing"))?;
        let a = number(map, "a")?.unwrap_or(DEFAULT_ACCEL);
        if a <= 0.0 {
            return Err(ConfigError::field("a", format!("must be positive, got {a}")));
        }
        let (c1_min, c1_max) = (required(map, "c1_min")?, required(map, "c1_max")?);
        if c1_min >= c1_max {
            return Err(ConfigError::field("c1_max", format!("must exceed c1_min ({c1_max} <= {c1_min})")));
        }
        let (c2_min, c2_max) = (required(map, "c2_min")?, required(map, "c2_max")?);
        if c2_min >= c2_max {
            return Err(ConfigError::field("c2_max", format!("must exceed c2_min ({c2_max} <= {c2_min})")));
        }
        let cfg = RunConfig {
            a,
            chart: map.get("chart").cloned().unwrap_or_default(),
            c1_min,
            c1_max,
            n1: count(map, "n1")?,
            c2_min,
            c2_max,
            n2: count(map, "n2")?,
            frame: choice(map, "frame", Frame::Null)?,
            output: map.get("output").filter(|s| s.as_str() != "-" && !s.is_empty()).map(PathBuf::from),
            format: choice(map, "format", Format::Csv)?,
            scenario,
        };
        // Validate names now so that they surface as config errors.
        let s = cfg.scenario()?;
        let chart = if cfg.chart.is_empty() { s.observation_chart().name().to_string() } else { cfg.chart.clone() };
        s.chart(&chart).map_err(|e| ConfigError::field("chart", e.to_string()))?;
        Ok(RunConfig { chart, ..cfg })
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        build_scenario(&self.scenario, self.a).map_err(|e| match e {
            confstress::Error::BadParameter { .. } => ConfigError::field("a", e.to_string()),
            _ => ConfigError::field("scenario", e.to_string()),
        })
    }
}
