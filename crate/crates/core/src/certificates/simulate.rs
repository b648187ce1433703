use serde::{Deserialize, Serialize};

use crate::densities::{DensityFamily, ParticleEnsemble, Scheme};
use crate::dynamics::{
    propagate_em, propagate_liouville_from, push_output, push_output_weighted, MapModel,
    RegisteredModel,
};
use crate::{Error, Result};

/// How output particles are weighted before measuring gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Carry the sampling weights (each particle keeps mass `1/nu`).
    #[default]
    Carried,
    /// Weight each particle by its propagated density value, normalized.
    /// Only available for deterministic flows.
    DensityValues,
}

/// Discretization shared by every propagation of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub nu: usize,
    pub dt: f64,
    pub scheme: Scheme,
    pub seed: u64,
    #[serde(default)]
    pub weighting: Weighting,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            nu: 1000,
            dt: 0.01,
            scheme: Scheme::Halton,
            seed: 0,
            weighting: Weighting::Carried,
        }
    }
}

/// Output ensembles of `model` started from `family`, one per time.
///
/// For maps the times are step counts and must be nonnegative integers;
/// only deterministic maps can be simulated particle-wise.
pub fn simulate(
    model: &RegisteredModel,
    family: &DensityFamily,
    times: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<ParticleEnsemble>> {
    match model {
        RegisteredModel::Ode(m) => {
            if family.dim() != m.dim() {
                return Err(Error::DimensionMismatch {
                    expected: m.dim(),
                    got: family.dim(),
                });
            }
            let ens = family.sample(cfg.nu, cfg.seed, cfg.scheme)?;
            match cfg.weighting {
                Weighting::Carried => {
                    let ones = vec![1.0; ens.len()];
                    propagate_liouville_from(m, &ens, &ones, times, cfg.dt)?
                        .into_iter()
                        .map(|w| push_output(&w.ensemble, m.output()))
                        .collect()
                }
                Weighting::DensityValues => {
                    let rho0 = (0..ens.len())
                        .map(|i| family.pdf(ens.point(i)))
                        .collect::<Result<Vec<_>>>()?;
                    propagate_liouville_from(m, &ens, &rho0, times, cfg.dt)?
                        .iter()
                        .map(|w| {
                            let out = push_output_weighted(w, m.output())?;
                            ParticleEnsemble::from_flat(
                                out.ensemble.dim(),
                                out.ensemble.flat_points().to_vec(),
                                Some(out.density),
                            )
                        })
                        .collect()
                }
            }
        }
        _ if cfg.weighting == Weighting::DensityValues => Err(Error::Unsupported(
            "density-value weighting needs a deterministic flow".into(),
        )),
        RegisteredModel::Sde(m) => propagate_em(m, family, cfg.nu, times, cfg.dt, cfg.seed, cfg.scheme)?
            .into_iter()
            .map(|e| push_output(&e, m.output()))
            .collect(),
        RegisteredModel::Map(m) => {
            if !matches!(m, MapModel::Deterministic { .. }) {
                return Err(Error::Unsupported(
                    "particle simulation of stochastic maps; use pf_step on a grid".into(),
                ));
            }
            let mut ens = family.sample(cfg.nu, cfg.seed, cfg.scheme)?;
            if ens.dim() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    got: ens.dim(),
                });
            }
            let mut k = 0u64;
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                if t < k as f64 || t.fract() != 0.0 {
                    return Err(Error::invalid("map snapshot times must be increasing integers"));
                }
                while (k as f64) < t {
                    ens = ens.map_points(1, |x, y| y[0] = m.apply(x[0]).unwrap_or(f64::NAN))?;
                    k += 1;
                }
                out.push(ens.clone());
            }
            Ok(out)
        }
    }
}
