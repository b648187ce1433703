use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::{Draw, InitialDensityLaw};
use super::simulate::{simulate, SimConfig};
use super::{n_chernoff, n_worstcase};
use crate::densities::{Cdf1D, ParticleEnsemble};
use crate::dynamics::RegisteredModel;
use crate::quadrature::QuadConfig;
use crate::transport::{w2_1d, w2_lp};
use crate::{Error, Result};

/// Per-snapshot tolerances `gamma_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSchedule {
    pub gammas: Vec<f64>,
}

impl ToleranceSchedule {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        let s = ToleranceSchedule { gammas };
        s.validate()?;
        Ok(s)
    }

    /// `gamma` for every snapshot.
    pub fn constant(gamma: f64, len: usize) -> Result<Self> {
        Self::new(vec![gamma; len])
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.iter().any(|g| !(*g > 0.0)) {
            return Err(Error::config("TOL_VALUE", "tolerances must be positive"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    #[serde(rename = "PRVC")]
    Prvc,
    #[serde(rename = "PWVC")]
    Pwvc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCertificate {
    pub kind: CertificateKind,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub nu: usize,
    pub seed: u64,
    pub model_id: String,
    pub snapshots: Vec<Snapshot>,
}

impl ValidationCertificate {
    pub fn values(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.value).collect()
    }
}

/// How the initial densities are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Draw the Chernoff (PRVC) or worst-case (PWVC) number of densities.
    #[default]
    Random,
    /// Use every member of a finite support once.
    Exhaustive,
}

/// Measured side of the comparison.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// Fixed ensembles, one per snapshot, shared by every draw.
    Fixed(Vec<ParticleEnsemble>),
    /// A reference model propagated from the same initial density as each
    /// draw.
    Reference(RegisteredModel),
}

/// Everything shared by PRVC and PWVC construction.
#[derive(Debug, Clone)]
pub struct CertificateInputs<'a> {
    pub data: &'a DataSource,
    pub model: &'a RegisteredModel,
    pub law: &'a InitialDensityLaw,
    pub times: &'a [f64],
    pub epsilon: f64,
    pub delta: f64,
    pub sim: SimConfig,
    pub mode: SamplingMode,
}

/// Gaps `W2(i, k)` between model and data for every draw and snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapMatrix {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// Row `i` is the trajectory of draw `i`.
    pub gaps: Vec<Vec<f64>>,
}

impl GapMatrix {
    pub fn n(&self) -> usize {
        self.gaps.len()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::config("TIMES", "at least one snapshot time is required"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !(times[0] >= 0.0) {
        return Err(Error::config("TIMES", "snapshot times must be nonnegative and strictly increasing"));
    }
    Ok(())
}

/// W2 between two ensembles: quantile formula in 1-D, LP otherwise.
pub fn ensemble_gap(a: &ParticleEnsemble, b: &ParticleEnsemble) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            got: a.dim(),
        });
    }
    if a.dim() == 1 {
        let f = Cdf1D::from_ensemble(a)?;
        let g = Cdf1D::from_ensemble(b)?;
        w2_1d(&f, &g, &QuadConfig::default())
    } else {
        Ok(w2_lp(a, b)?.0)
    }
}

fn draws(law: &InitialDensityLaw, mode: SamplingMode, n: usize, seed: u64) -> Result<Vec<Draw>> {
    law.validate()?;
    match mode {
        SamplingMode::Random => (0..n).map(|i| law.draw(i, seed)).collect(),
        SamplingMode::Exhaustive => law
            .support()
            .ok_or_else(|| Error::config("LAW", "exhaustive sampling needs a finite support")),
    }
}

fn provenance(i: usize, times: &[f64], e: Error) -> Error {
    let (time, reason) = match e {
        Error::Propagation { time, reason, .. } => (time, reason),
        other => (times.first().copied().unwrap_or(0.0), other.to_string()),
    };
    Error::SampledDensity {
        density: i,
        time,
        reason,
    }
}

/// Propagate each draw, push to the output space and measure the gap to the
/// data at every snapshot. Rows are computed in parallel.
pub fn gap_matrix(inp: &CertificateInputs<'_>, n: usize) -> Result<GapMatrix> {
    check_times(inp.times)?;
    if let DataSource::Fixed(d) = inp.data {
        if d.len() != inp.times.len() {
            return Err(Error::config(
                "DATA_LEN",
                format!("{} data snapshots for {} times", d.len(), inp.times.len()),
            ));
        }
    }
    let ds = draws(inp.law, inp.mode, n, inp.sim.seed)?;
    let gaps = ds
        .par_iter()
        .enumerate()
        .map(|(i, draw)| -> Result<Vec<f64>> {
            let model = simulate(inp.model, &draw.family, inp.times, &inp.sim)
                .map_err(|e| provenance(i, inp.times, e))?;
            let reference;
            let data: &[ParticleEnsemble] = match inp.data {
                DataSource::Fixed(d) => d,
                DataSource::Reference(m) => {
                    reference = simulate(m, &draw.family, inp.times, &inp.sim)
                        .map_err(|e| provenance(i, inp.times, e))?;
                    &reference
                }
            };
            model
                .par_iter()
                .zip(data.par_iter())
                .zip(inp.times.par_iter())
                .map(|((m, d), t)| {
                    ensemble_gap(m, d).map_err(|e| Error::SampledDensity {
                        density: i,
                        time: *t,
                        reason: e.to_string(),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GapMatrix {
        times: inp.times.to_vec(),
        labels: ds.into_iter().map(|d| d.label).collect(),
        gaps,
    })
}

/// Fraction of rows with `gap <= gamma_k`, per snapshot.
pub fn prvc_values(gaps: &GapMatrix, gamma: &ToleranceSchedule) -> Result<Vec<f64>> {
    gamma.validate()?;
    if gamma.len() != gaps.times.len() {
        return Err(Error::config(
            "TOL_LEN",
            format!("{} tolerances for {} snapshots", gamma.len(), gaps.times.len()),
        ));
    }
    let n = gaps.n();
    if n == 0 {
        return Err(Error::invalid("no sampled densities"));
    }
    Ok((0..gaps.times.len())
        .map(|k| {
            let count = gaps.gaps.iter().filter(|row| row[k] <= gamma.gammas[k]).count();
            count as f64 / n as f64
        })
        .collect())
}

/// Maximum gap over rows, per snapshot.
pub fn pwvc_values(gaps: &GapMatrix) -> Result<Vec<f64>> {
    if gaps.n() == 0 {
        return Err(Error::invalid("no sampled densities"));
    }
    Ok((0..gaps.times.len())
        .map(|k| gaps.gaps.iter().map(|row| row[k]).fold(0.0, f64::max))
        .collect())
}

fn certificate(
    kind: CertificateKind,
    inp: &CertificateInputs<'_>,
    n: usize,
    values: Vec<f64>,
) -> ValidationCertificate {
    ValidationCertificate {
        kind,
        epsilon: inp.epsilon,
        delta: inp.delta,
        n,
        nu: inp.sim.nu,
        seed: inp.sim.seed,
        model_id: inp.model.id().to_string(),
        snapshots: inp
            .times
            .iter()
            .zip(values)
            .map(|(&t, value)| Snapshot { t, value })
            .collect(),
    }
}

pub fn prvc_from_gaps(
    inp: &CertificateInputs<'_>,
    gaps: &GapMatrix,
    gamma: &ToleranceSchedule,
) -> Result<ValidationCertificate> {
    let v = prvc_values(gaps, gamma)?;
    Ok(certificate(CertificateKind::Prvc, inp, gaps.n(), v))
}

pub fn pwvc_from_gaps(inp: &CertificateInputs<'_>, gaps: &GapMatrix) -> Result<ValidationCertificate> {
    let v = pwvc_values(gaps)?;
    Ok(certificate(CertificateKind::Pwvc, inp, gaps.n(), v))
}

/// Probabilistically robust validation certificate.
///
/// Draws `n_chernoff(eps, delta)` initial densities (or the whole support in
/// exhaustive mode) and reports, per snapshot, the fraction whose gap is
/// within `gamma_k`.
pub fn construct_prvc(
    inp: &CertificateInputs<'_>,
    gamma: &ToleranceSchedule,
) -> Result<(ValidationCertificate, GapMatrix)> {
    if gamma.len() != inp.times.len() {
        return Err(Error::config(
            "TOL_LEN",
            format!("{} tolerances for {} snapshots", gamma.len(), inp.times.len()),
        ));
    }
    let n = n_chernoff(inp.epsilon, inp.delta)? as usize;
    let gaps = gap_matrix(inp, n)?;
    Ok((prvc_from_gaps(inp, &gaps, gamma)?, gaps))
}

/// Probabilistically worst-case validation certificate: the per-snapshot
/// maximum gap over `n_worstcase(eps, delta)` draws.
pub fn construct_pwvc(inp: &CertificateInputs<'_>) -> Result<(ValidationCertificate, GapMatrix)> {
    let n = n_worstcase(inp.epsilon, inp.delta)? as usize;
    let gaps = gap_matrix(inp, n)?;
    Ok((pwvc_from_gaps(inp, &gaps)?, gaps))
}
