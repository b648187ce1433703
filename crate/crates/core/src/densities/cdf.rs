use super::grid::GridCdf;
use super::{DensityFamily, ParticleEnsemble};
use crate::special::{beta_reg, inv_beta_reg, norm_cdf, norm_quantile};
use crate::{Error, Result};

use std::f64::consts::{FRAC_PI_2, PI};

/// One-dimensional cumulative distribution function.
#[derive(Debug, Clone, PartialEq)]
pub enum Cdf1D {
    Gaussian { mean: f64, sd: f64 },
    Uniform { a: f64, b: f64 },
    ScaledBeta { alpha: f64, beta: f64, a: f64, b: f64 },
    Arcsine { a: f64, b: f64 },
    /// Right-continuous step function: `F(xs[k]) = cum[k]`, `xs` strictly increasing.
    Step { xs: Vec<f64>, cum: Vec<f64> },
    Grid(GridCdf),
}

/// CDF of a one-dimensional family.
pub fn cdf(source: &DensityFamily) -> Result<Cdf1D> {
    if source.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "CDF of a {}-dimensional density",
            source.dim()
        )));
    }
    Ok(match source {
        DensityFamily::Gaussian { mean, cov } => {
            let sd = cov[0][0].sqrt();
            if sd == 0.0 {
                Cdf1D::Step {
                    xs: vec![mean[0]],
                    cum: vec![1.0],
                }
            } else {
                Cdf1D::Gaussian { mean: mean[0], sd }
            }
        }
        DensityFamily::UniformBox { lower, upper } => Cdf1D::Uniform {
            a: lower[0],
            b: upper[0],
        },
        DensityFamily::ScaledBeta { alpha, beta, a, b } => {
            if *alpha == 0.5 && *beta == 0.5 {
                Cdf1D::Arcsine { a: *a, b: *b }
            } else {
                Cdf1D::ScaledBeta {
                    alpha: *alpha,
                    beta: *beta,
                    a: *a,
                    b: *b,
                }
            }
        }
        DensityFamily::Arcsine { a, b } => Cdf1D::Arcsine { a: *a, b: *b },
        DensityFamily::DiracMixture { locations, masses } => {
            let pts = locations.iter().map(|l| l[0]).collect::<Vec<_>>();
            step_from(pts.into_iter().zip(masses.iter().copied()))
        }
        DensityFamily::Empirical(e) => Cdf1D::from_ensemble(e)?,
    })
}

fn step_from(pairs: impl Iterator<Item = (f64, f64)>) -> Cdf1D {
    let mut v: Vec<(f64, f64)> = pairs.filter(|p| p.1 > 0.0).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = v.iter().map(|p| p.1).sum();
    let mut xs: Vec<f64> = Vec::with_capacity(v.len());
    let mut cum: Vec<f64> = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    for (x, w) in v {
        acc += w / total;
        if xs.last() == Some(&x) {
            *cum.last_mut().unwrap() = acc;
        } else {
            xs.push(x);
            cum.push(acc);
        }
    }
    if let Some(last) = cum.last_mut() {
        *last = 1.0;
    }
    Cdf1D::Step { xs, cum }
}

impl Cdf1D {
    /// Step CDF of a one-dimensional ensemble.
    pub fn from_ensemble(e: &ParticleEnsemble) -> Result<Self> {
        if e.dim() != 1 {
            return Err(Error::Unsupported(format!(
                "CDF of a {}-dimensional ensemble",
                e.dim()
            )));
        }
        Ok(step_from(e.iter().map(|(p, w)| (p[0], w))))
    }

    /// Evaluate `F(y)`.
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Cdf1D::Gaussian { mean, sd } => norm_cdf((y - mean) / sd),
            Cdf1D::Uniform { a, b } => ((y - a) / (b - a)).clamp(0.0, 1.0),
            Cdf1D::ScaledBeta { alpha, beta, a, b } => {
                let u = (y - a) / (b - a);
                if u <= 0.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    beta_reg(*alpha, *beta, u)
                }
            }
            Cdf1D::Arcsine { a, b } => {
                let u = ((y - a) / (b - a)).clamp(0.0, 1.0);
                2.0 / PI * u.sqrt().asin()
            }
            Cdf1D::Step { xs, cum } => {
                let k = xs.partition_point(|x| *x <= y);
                if k == 0 {
                    0.0
                } else {
                    cum[k - 1]
                }
            }
            Cdf1D::Grid(g) => g.eval(y),
        }
    }

    /// Generalized inverse `inf { y : s <= F(y) }`.
    ///
    /// At `s = 0` the lower end of the support is returned (`-inf` for
    /// Gaussians, the smallest atom for step functions).
    pub fn quantile(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid(format!("quantile level {s} outside [0, 1]")));
        }
        Ok(match self {
            Cdf1D::Gaussian { mean, sd } => mean + sd * norm_quantile(s),
            Cdf1D::Uniform { a, b } => a + (b - a) * s,
            Cdf1D::ScaledBeta { alpha, beta, a, b } => a + (b - a) * inv_beta_reg(*alpha, *beta, s),
            Cdf1D::Arcsine { a, b } => {
                let t = (FRAC_PI_2 * s).sin();
                a + (b - a) * t * t
            }
            Cdf1D::Step { xs, cum } => {
                let k = cum.partition_point(|c| *c < s).min(xs.len() - 1);
                xs[k]
            }
            Cdf1D::Grid(g) => g.quantile(s),
        })
    }

    /// Mass levels in `(0, 1)` where the quantile function jumps.
    pub fn jump_levels(&self) -> Vec<f64> {
        match self {
            Cdf1D::Step { cum, .. } => cum[..cum.len() - 1].to_vec(),
            _ => Vec::new(),
        }
    }

    pub fn is_step(&self) -> bool {
        matches!(self, Cdf1D::Step { .. })
    }
}
