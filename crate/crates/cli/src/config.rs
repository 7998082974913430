//! Run configuration: a TOML file merged field by field with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// `A` as a number or `"auto"` (minimise the pulse area).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAmplitude", into = "RawAmplitude")]
pub enum AmplitudeChoice {
    Auto,
    Value(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawAmplitude {
    Number(f64),
    Text(String),
}

impl TryFrom<RawAmplitude> for AmplitudeChoice {
    type Error = String;

    fn try_from(raw: RawAmplitude) -> Result<Self, String> {
        match raw {
            RawAmplitude::Number(v) => Ok(Self::Value(v)),
            RawAmplitude::Text(s) => s.parse(),
        }
    }
}

impl From<AmplitudeChoice> for RawAmplitude {
    fn from(a: AmplitudeChoice) -> Self {
        match a {
            AmplitudeChoice::Auto => RawAmplitude::Text("auto".into()),
            AmplitudeChoice::Value(v) => RawAmplitude::Number(v),
        }
    }
}

impl FromStr for AmplitudeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v > 0.0)
            .map(Self::Value)
            .ok_or_else(|| format!("amplitude must be `auto` or a positive number, got `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    Noncyclic,
    Nhqc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MetricChoice {
    State,
    Gate,
    Both,
}

/// Figure presets for `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Figure {
    #[value(name = "2b")]
    #[serde(rename = "2b")]
    AreaCurve,
    #[value(name = "2c")]
    #[serde(rename = "2c")]
    MinAreaCurve,
    #[value(name = "3")]
    #[serde(rename = "3")]
    Populations,
    #[value(name = "4")]
    #[serde(rename = "4")]
    RobustnessX,
    #[value(name = "5")]
    #[serde(rename = "5")]
    RobustnessY,
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Figure::AreaCurve => "2b",
            Figure::MinAreaCurve => "2c",
            Figure::Populations => "3",
            Figure::RobustnessX => "4",
            Figure::RobustnessY => "5",
        };
        f.write_str(s)
    }
}

/// `lo:hi:n`, `n` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        lambda_holonomy::sweeps::linspace(self.lo, self.hi, self.points)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("grid must look like lo:hi:n, got `{s}`");
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        Ok(Self {
            lo: lo.trim().parse().map_err(|_| bad())?,
            hi: hi.trim().parse().map_err(|_| bad())?,
            points: n.trim().parse().map_err(|_| bad())?,
        })
    }
}

impl TryFrom<String> for GridSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        format!("{}:{}:{}", g.lo, g.hi, g.points)
    }
}

/// `e0,e1`
pub fn parse_eps(s: &str) -> Result<[f64; 2], String> {
    let bad = || format!("expected two comma-separated numbers, got `{s}`");
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

/// Every setting a run can take. Missing fields fall back to defaults at resolution time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<AmplitudeChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_segment: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub platform: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<Figure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Stamp outputs with the wall-clock time; off by default so reruns are byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Field-wise merge where `self` (the flags) wins. The choices `A`/auto and
    /// duration/Rabi cap are taken as a unit from whichever side sets them on the flags.
    pub fn over(self, file: RunConfig) -> RunConfig {
        let duration_from_flags = self.total.is_some() || self.rabi_cap.is_some();
        let sampling_from_flags = self.dt.is_some() || self.samples_per_segment.is_some();
        RunConfig {
            theta: self.theta.or(file.theta),
            phi: self.phi.or(file.phi),
            amplitude: self.amplitude.or(file.amplitude),
            total: if duration_from_flags { self.total } else { file.total },
            rabi_cap: if duration_from_flags { self.rabi_cap } else { file.rabi_cap },
            dt: if sampling_from_flags { self.dt } else { file.dt },
            samples_per_segment: if sampling_from_flags {
                self.samples_per_segment
            } else {
                file.samples_per_segment
            },
            platform: self.platform.or(file.platform),
            gamma1: self.gamma1.or(file.gamma1),
            gamma2: self.gamma2.or(file.gamma2),
            eps: self.eps.or(file.eps),
            scheme: self.scheme.or(file.scheme),
            metric: self.metric.or(file.metric),
            figure: self.figure.or(file.figure),
            eps_grid: self.eps_grid.or(file.eps_grid),
            theta_grid_points: self.theta_grid_points.or(file.theta_grid_points),
            amplitude_grid: self.amplitude_grid.or(file.amplitude_grid),
            fidelity_states: self.fidelity_states.or(file.fidelity_states),
            out: self.out.or(file.out),
            summary: self.summary.or(file.summary),
            record: self.record.or(file.record),
            out_dir: self.out_dir.or(file.out_dir),
            workers: self.workers.or(file.workers),
            timestamp: self.timestamp.or(file.timestamp),
        }
    }
}
