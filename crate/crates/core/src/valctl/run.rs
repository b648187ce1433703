use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{CertKind, DataSpec, ValidationConfig};
use crate::analytic::{lti_bounds, prajna_check, Interval, LtiBounds, LtiPair, PrajnaResult, Verdict};
use crate::certificates::{
    gap_matrix, n_chernoff, n_worstcase, prvc_from_gaps, pwvc_from_gaps, CertificateInputs,
    DataSource, GapMatrix, SamplingMode, ValidationCertificate,
};
use crate::densities::ParticleEnsemble;
use crate::dynamics::build_model;
use crate::linalg::from_rows;
use crate::{Error, Result};

/// Non-fatal condition attached to a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

impl Warning {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Warning {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

/// W2 trajectory of one sampled initial density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub draw: usize,
    pub label: String,
    pub w2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub model_id: String,
    pub n_draws: usize,
    pub nu: usize,
    pub seed: u64,
    pub dt: f64,
}

/// Wall-clock timings; excluded from determinism comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub gaps_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub times: Vec<f64>,
    pub certificates: Vec<ValidationCertificate>,
    pub series: Vec<Series>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prajna: Option<PrajnaResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lti: Option<Vec<LtiBounds>>,
    pub warnings: Vec<Warning>,
    #[serde(default)]
    pub timings: Timings,
}

impl Report {
    /// True when the hard invalidation check rejected the model.
    pub fn invalidated(&self) -> bool {
        self.prajna.is_some_and(|p| p.verdict == Verdict::Invalidated)
    }

    pub fn certificate(&self, kind: crate::certificates::CertificateKind) -> Option<&ValidationCertificate> {
        self.certificates.iter().find(|c| c.kind == kind)
    }

    /// Report JSON with the timings zeroed, for byte comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.timings = Timings::default();
        Ok(serde_json::to_string_pretty(&r)?)
    }
}

/// Read snapshot ensembles from a directory: every `*.csv`, sorted by name.
pub fn read_data_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    Ok(paths)
}

fn load_ensembles(paths: &[PathBuf]) -> Result<Vec<ParticleEnsemble>> {
    let ens = paths
        .iter()
        .map(|p| {
            ParticleEnsemble::read_csv(p).map_err(|e| {
                Error::config("DATA", format!("{}: {e}", p.display()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = ens.first() {
        if let Some((i, e)) = ens.iter().enumerate().find(|(_, e)| e.dim() != first.dim()) {
            return Err(Error::config(
                "DIM_MISMATCH",
                format!("{}: dimension {} differs from {}", paths[i].display(), e.dim(), first.dim()),
            ));
        }
    }
    Ok(ens)
}

/// Run propagation, distances and certificates for one config.
///
/// `data_override` replaces the config's data section with the snapshot
/// files found in that directory.
pub fn run_validate(cfg: &ValidationConfig, data_override: Option<&Path>) -> Result<Report> {
    let start = Instant::now();
    let mut cfg = cfg.clone();
    if let Some(dir) = data_override {
        cfg.data = Some(DataSpec::Files {
            paths: read_data_dir(dir)?,
        });
    }
    cfg.validate()?;
    let model = build_model(&cfg.model.id, &cfg.model.params)?;
    let data = match &cfg.data {
        Some(DataSpec::Files { paths }) => DataSource::Fixed(load_ensembles(paths)?),
        Some(DataSpec::Reference { model }) => DataSource::Reference(build_model(&model.id, &model.params)?),
        None => return Err(Error::config("DATA", "no data section and no --data directory")),
    };
    let mut warnings = Vec::new();

    let prajna = match &cfg.prajna {
        Some(p) => {
            let iv = |i: Interval| Interval::new(i.lo, i.hi);
            Some(prajna_check(iv(p.x0)?, iv(p.xt)?, iv(p.p)?, p.t)?)
        }
        None => None,
    };
    let lti = match &cfg.lti {
        Some(l) => {
            let pair = LtiPair::new(from_rows(&l.a)?, from_rows(&l.a_hat)?, from_rows(&l.p0)?)?;
            Some((0..=l.k_max).map(|k| lti_bounds(&pair, k)).collect::<Result<Vec<_>>>()?)
        }
        None => None,
    };
    let metadata = |n_draws| Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        model_id: cfg.model.id.clone(),
        n_draws,
        nu: cfg.nu,
        seed: cfg.seed,
        dt: cfg.dt,
    };
    if prajna.is_some_and(|p| p.verdict == Verdict::Invalidated) {
        log::info!("model invalidated by the reachability check; skipping certificates");
        return Ok(Report {
            metadata: metadata(0),
            times: cfg.times.clone(),
            certificates: vec![],
            series: vec![],
            prajna,
            lti,
            warnings,
            timings: Timings {
                gaps_ms: 0.0,
                total_ms: start.elapsed().as_secs_f64() * 1e3,
            },
        });
    }

    let inp = CertificateInputs {
        data: &data,
        model: &model,
        law: &cfg.law,
        times: &cfg.times,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        sim: cfg.sim(),
        mode: cfg.sampling,
    };
    let n_ch = n_chernoff(cfg.epsilon, cfg.delta)? as usize;
    let n_wc = n_worstcase(cfg.epsilon, cfg.delta)? as usize;
    // draws use per-index streams, so the PWVC draws are a prefix of the PRVC ones
    let n = cfg
        .certificates
        .iter()
        .map(|k| match k {
            CertKind::Prvc => n_ch,
            CertKind::Pwvc => n_wc,
        })
        .max()
        .unwrap_or(0);
    let t_gap = Instant::now();
    let gaps = if n > 0 { Some(gap_matrix(&inp, n)?) } else { None };
    let gaps_ms = t_gap.elapsed().as_secs_f64() * 1e3;
    log::info!("gap matrix for {n} draws took {gaps_ms:.0} ms");

    let mut certificates = Vec::new();
    if let Some(g) = &gaps {
        if cfg.sampling == SamplingMode::Exhaustive && g.n() < n {
            warnings.push(Warning::new(
                "EXHAUSTIVE_N",
                format!(
                    "exhaustive sampling used N = {} < {n}; the (epsilon, delta) guarantee does not apply",
                    g.n()
                ),
            ));
        }
        for kind in &cfg.certificates {
            let c = match kind {
                CertKind::Prvc => {
                    let sub = prefix(g, n_ch, cfg.sampling);
                    prvc_from_gaps(&inp, &sub, cfg.tolerance.as_ref().expect("validated"))?
                }
                CertKind::Pwvc => pwvc_from_gaps(&inp, &prefix(g, n_wc, cfg.sampling))?,
            };
            certificates.push(c);
        }
    }
    let series: Vec<Series> = gaps
        .map(|g| {
            g.labels
                .into_iter()
                .zip(g.gaps)
                .enumerate()
                .map(|(draw, (label, w2))| Series { draw, label, w2 })
                .collect()
        })
        .unwrap_or_default();
    let n_draws = series.len();
    Ok(Report {
        metadata: metadata(n_draws),
        times: cfg.times.clone(),
        certificates,
        series,
        prajna,
        lti,
        warnings,
        timings: Timings {
            gaps_ms,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

fn prefix(g: &GapMatrix, n: usize, mode: SamplingMode) -> GapMatrix {
    if mode == SamplingMode::Exhaustive || g.n() <= n {
        return g.clone();
    }
    GapMatrix {
        times: g.times.clone(),
        labels: g.labels[..n].to_vec(),
        gaps: g.gaps[..n].to_vec(),
    }
}

/// Write the report and certificate JSON and, if enabled, one `t,w2` CSV
/// per draw under `series/`.
pub fn write_report(report: &Report, cfg: &ValidationConfig, out: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out)?;
    let name = cfg.outputs.report.clone().unwrap_or_else(|| "report.json".into());
    let path = out.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(report)? + "\n")?;
    for c in &report.certificates {
        let file = match c.kind {
            crate::certificates::CertificateKind::Prvc => "prvc.json",
            crate::certificates::CertificateKind::Pwvc => "pwvc.json",
        };
        std::fs::write(out.join(file), serde_json::to_string_pretty(c)? + "\n")?;
    }
    if cfg.outputs.series && !report.series.is_empty() {
        let dir = out.join("series");
        std::fs::create_dir_all(&dir)?;
        for s in &report.series {
            let pairs: Vec<(f64, f64)> = report.times.iter().copied().zip(s.w2.iter().copied()).collect();
            let f = std::fs::File::create(dir.join(format!("draw{:04}.csv", s.draw)))?;
            crate::transport::write_series_csv(f, &pairs)?;
        }
    }
    Ok(path)
}
