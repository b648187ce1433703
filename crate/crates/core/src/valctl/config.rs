use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::Interval;
use crate::certificates::{InitialDensityLaw, SamplingMode, SimConfig, ToleranceSchedule, Weighting};
use crate::densities::Scheme;
use crate::{Error, Result};

/// Registry model selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub id: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// Where the measured side comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// One ensemble CSV per snapshot, relative paths resolved against the
    /// config file.
    Files { paths: Vec<PathBuf> },
    /// A reference model propagated from each drawn initial density.
    Reference { model: ModelSpec },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertKind {
    Prvc,
    Pwvc,
}

/// Hard invalidation check run before the certificates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrajnaSpec {
    pub x0: Interval,
    pub xt: Interval,
    pub p: Interval,
    pub t: f64,
}

/// Optional discrete-time LTI comparison reported next to the certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtiSpec {
    /// Row-major square matrices.
    pub a: Vec<Vec<f64>>,
    pub a_hat: Vec<Vec<f64>>,
    pub p0: Vec<Vec<f64>>,
    pub k_max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Report file name inside `--out` (default `report.json`).
    #[serde(default)]
    pub report: Option<String>,
    /// Write per-draw W2 series CSVs next to the report.
    #[serde(default = "yes")]
    pub series: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            report: None,
            series: true,
        }
    }
}

fn yes() -> bool {
    true
}

fn default_nu() -> usize {
    1000
}

fn default_dt() -> f64 {
    0.01
}

fn default_certs() -> Vec<CertKind> {
    vec![CertKind::Prvc, CertKind::Pwvc]
}

/// Full description of a validation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    pub model: ModelSpec,
    /// May be omitted when `--data` supplies the snapshot files.
    #[serde(default)]
    pub data: Option<DataSpec>,
    pub law: InitialDensityLaw,
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerance: Option<ToleranceSchedule>,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default = "default_nu")]
    pub nu: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub weighting: Weighting,
    #[serde(default)]
    pub sampling: SamplingMode,
    #[serde(default = "default_certs")]
    pub certificates: Vec<CertKind>,
    #[serde(default)]
    pub prajna: Option<PrajnaSpec>,
    #[serde(default)]
    pub lti: Option<LtiSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl ValidationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("SCHEMA", e.to_string()))
    }

    /// Read a config; relative data paths are made relative to its folder.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(DataSpec::Files { paths }) = &mut cfg.data {
            let base = path.parent().unwrap_or(Path::new("."));
            for p in paths.iter_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig {
            nu: self.nu,
            dt: self.dt,
            scheme: self.scheme,
            seed: self.seed,
            weighting: self.weighting,
        }
    }

    /// Structural checks that do not need any propagation.
    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::config("TIMES", "at least one snapshot time is required"));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) || !(self.times[0] >= 0.0) {
            return Err(Error::config("TIMES", "snapshot times must be nonnegative and strictly increasing"));
        }
        if self.certificates.contains(&CertKind::Prvc) {
            let tol = self
                .tolerance
                .as_ref()
                .ok_or_else(|| Error::config("TOL_LEN", "PRVC requested without a tolerance schedule"))?;
            if tol.len() != self.times.len() {
                return Err(Error::config(
                    "TOL_LEN",
                    format!("{} tolerances for {} snapshot times", tol.len(), self.times.len()),
                ));
            }
            tol.validate()?;
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 && self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config("EPS_DELTA", "epsilon and delta must lie in (0, 1)"));
        }
        if self.nu == 0 {
            return Err(Error::config("NU", "nu must be at least 1"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("DT", "dt must be positive"));
        }
        self.law.validate()?;
        if let Some(DataSpec::Files { paths }) = &self.data {
            if paths.len() != self.times.len() {
                return Err(Error::config(
                    "DATA_LEN",
                    format!("{} data files for {} snapshot times", paths.len(), self.times.len()),
                ));
            }
        }
        Ok(())
    }
}
