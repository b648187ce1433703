use rand::SeedableRng;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::densities::DensityFamily;
use crate::{Error, Result};

/// Law of the random initial density over an admissible set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDensityLaw {
    /// A finite list, drawn with the given probabilities (uniform if absent).
    Finite {
        families: Vec<DensityFamily>,
        #[serde(default)]
        probabilities: Option<Vec<f64>>,
    },
    /// Isotropic Gaussians `N(mean, sigma^2 I)` with `sigma` drawn uniformly
    /// from a grid.
    GaussianSigmaGrid { mean: Vec<f64>, sigmas: Vec<f64> },
    /// Isotropic Gaussians with `sigma` uniform on `[lo, hi]`.
    GaussianSigmaUniform { mean: Vec<f64>, lo: f64, hi: f64 },
}

/// One draw from the law together with a short label.
#[derive(Debug, Clone)]
pub struct Draw {
    pub label: String,
    pub family: DensityFamily,
}

impl InitialDensityLaw {
    pub fn point(family: DensityFamily) -> Self {
        InitialDensityLaw::Finite {
            families: vec![family],
            probabilities: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialDensityLaw::Finite {
                families,
                probabilities,
            } => {
                if families.is_empty() {
                    return Err(Error::config("LAW", "empty admissible set"));
                }
                let d = families[0].dim();
                for f in families {
                    f.validate()?;
                    if f.dim() != d {
                        return Err(Error::config("LAW", "admissible densities differ in dimension"));
                    }
                }
                if let Some(p) = probabilities {
                    if p.len() != families.len() {
                        return Err(Error::config("LAW", "one probability per family is required"));
                    }
                    if p.iter().any(|v| !(*v >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                        return Err(Error::config("LAW", "probabilities must be nonnegative and sum to 1"));
                    }
                }
            }
            InitialDensityLaw::GaussianSigmaGrid { mean, sigmas } => {
                if mean.is_empty() || sigmas.is_empty() || sigmas.iter().any(|s| !(*s >= 0.0)) {
                    return Err(Error::config("LAW", "Gaussian sigma grid needs a mean and sigmas >= 0"));
                }
            }
            InitialDensityLaw::GaussianSigmaUniform { mean, lo, hi } => {
                if mean.is_empty() || !(*lo >= 0.0 && hi >= lo) {
                    return Err(Error::config("LAW", "sigma range must satisfy 0 <= lo <= hi"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialDensityLaw::Finite { families, .. } => families.first().map_or(0, |f| f.dim()),
            InitialDensityLaw::GaussianSigmaGrid { mean, .. }
            | InitialDensityLaw::GaussianSigmaUniform { mean, .. } => mean.len(),
        }
    }

    /// Every member of a finite support once, in order; `None` for
    /// continuous laws.
    pub fn support(&self) -> Option<Vec<Draw>> {
        match self {
            InitialDensityLaw::Finite { families, .. } => Some(
                families
                    .iter()
                    .enumerate()
                    .map(|(i, f)| Draw {
                        label: format!("family{i}"),
                        family: f.clone(),
                    })
                    .collect(),
            ),
            InitialDensityLaw::GaussianSigmaGrid { mean, sigmas } => {
                sigmas.iter().map(|s| sigma_draw(mean, *s)).collect::<Result<_>>().ok()
            }
            InitialDensityLaw::GaussianSigmaUniform { .. } => None,
        }
    }

    /// Draw `i` of the sequence seeded by `seed`; each index uses its own
    /// ChaCha8 stream so draws do not depend on how many are taken.
    pub fn draw(&self, i: usize, seed: u64) -> Result<Draw> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let u: f64 = rng.random();
        match self {
            InitialDensityLaw::Finite {
                families,
                probabilities,
            } => {
                let k = match probabilities {
                    None => ((u * families.len() as f64) as usize).min(families.len() - 1),
                    Some(p) => {
                        let mut acc = 0.0;
                        let mut k = p.len() - 1;
                        for (j, pj) in p.iter().enumerate() {
                            acc += pj;
                            if u < acc {
                                k = j;
                                break;
                            }
                        }
                        k
                    }
                };
                Ok(Draw {
                    label: format!("family{k}"),
                    family: families[k].clone(),
                })
            }
            InitialDensityLaw::GaussianSigmaGrid { mean, sigmas } => {
                let k = ((u * sigmas.len() as f64) as usize).min(sigmas.len() - 1);
                sigma_draw(mean, sigmas[k])
            }
            InitialDensityLaw::GaussianSigmaUniform { mean, lo, hi } => {
                sigma_draw(mean, lo + (hi - lo) * u)
            }
        }
    }
}

fn sigma_draw(mean: &[f64], sigma: f64) -> Result<Draw> {
    Ok(Draw {
        label: format!("sigma{sigma}"),
        family: DensityFamily::isotropic(mean.to_vec(), sigma)?,
    })
}
