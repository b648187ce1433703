use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{halton, ParticleEnsemble};
use crate::linalg::{check_psd, from_rows, sqrtm_psd};
use crate::special::{beta_pdf, inv_beta_reg, norm_quantile};
use crate::{Error, Result};

/// Sampling scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Pseudo,
    Halton,
}

/// Closed-form density descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityFamily {
    Gaussian {
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
    },
    UniformBox {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    ScaledBeta {
        alpha: f64,
        beta: f64,
        a: f64,
        b: f64,
    },
    Arcsine {
        a: f64,
        b: f64,
    },
    DiracMixture {
        locations: Vec<Vec<f64>>,
        masses: Vec<f64>,
    },
    #[serde(skip)]
    Empirical(ParticleEnsemble),
}

impl DensityFamily {
    pub fn gaussian(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        let f = DensityFamily::Gaussian { mean, cov };
        f.validate()?;
        Ok(f)
    }

    /// Isotropic Gaussian `N(mean, sigma^2 I)`.
    pub fn isotropic(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        let d = mean.len();
        let cov = (0..d)
            .map(|i| (0..d).map(|j| if i == j { sigma * sigma } else { 0.0 }).collect())
            .collect();
        Self::gaussian(mean, cov)
    }

    pub fn uniform(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let f = DensityFamily::UniformBox { lower, upper };
        f.validate()?;
        Ok(f)
    }

    pub fn scaled_beta(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        let f = DensityFamily::ScaledBeta { alpha, beta, a, b };
        f.validate()?;
        Ok(f)
    }

    pub fn arcsine(a: f64, b: f64) -> Result<Self> {
        let f = DensityFamily::Arcsine { a, b };
        f.validate()?;
        Ok(f)
    }

    pub fn dirac_mixture(locations: Vec<Vec<f64>>, masses: Vec<f64>) -> Result<Self> {
        let f = DensityFamily::DiracMixture { locations, masses };
        f.validate()?;
        Ok(f)
    }

    /// Check the variant's invariants.
    pub fn validate(&self) -> Result<()> {
        let params: Vec<f64> = match self {
            DensityFamily::Gaussian { mean, cov } => mean.iter().chain(cov.iter().flatten()).copied().collect(),
            DensityFamily::UniformBox { lower, upper } => lower.iter().chain(upper).copied().collect(),
            DensityFamily::ScaledBeta { alpha, beta, a, b } => vec![*alpha, *beta, *a, *b],
            DensityFamily::Arcsine { a, b } => vec![*a, *b],
            DensityFamily::DiracMixture { locations, masses } => {
                locations.iter().flatten().chain(masses).copied().collect()
            }
            DensityFamily::Empirical(_) => Vec::new(),
        };
        let ok = params.iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::invalid("density parameters must be finite"));
        }
        match self {
            DensityFamily::Gaussian { mean, cov } => {
                if mean.is_empty() {
                    return Err(Error::invalid("Gaussian mean is empty"));
                }
                let c = from_rows(cov)?;
                if c.shape() != (mean.len(), mean.len()) {
                    return Err(Error::DimensionMismatch {
                        expected: mean.len(),
                        got: c.nrows(),
                    });
                }
                check_psd(&c)
            }
            DensityFamily::UniformBox { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return Err(Error::invalid("uniform box bounds must be nonempty and equal length"));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(u > l)) {
                    return Err(Error::invalid("uniform box needs upper > lower on every axis"));
                }
                Ok(())
            }
            DensityFamily::ScaledBeta { alpha, beta, a, b } => {
                if !(*alpha > 0.0 && *beta > 0.0) {
                    return Err(Error::invalid("beta parameters must be positive"));
                }
                if !(b > a) {
                    return Err(Error::invalid("scaled beta needs b > a"));
                }
                Ok(())
            }
            DensityFamily::Arcsine { a, b } => {
                if !(b > a) {
                    return Err(Error::invalid("arcsine needs b > a"));
                }
                Ok(())
            }
            DensityFamily::DiracMixture { locations, masses } => {
                if locations.is_empty() || locations.len() != masses.len() {
                    return Err(Error::invalid("Dirac mixture needs one mass per location"));
                }
                let d = locations[0].len();
                if d == 0 || locations.iter().any(|l| l.len() != d) {
                    return Err(Error::invalid("Dirac locations must share a positive dimension"));
                }
                if masses.iter().any(|m| !(*m >= 0.0)) {
                    return Err(Error::invalid("Dirac masses must be nonnegative"));
                }
                let s: f64 = masses.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid(format!("Dirac masses sum to {s}, not 1")));
                }
                Ok(())
            }
            DensityFamily::Empirical(_) => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DensityFamily::Gaussian { mean, .. } => mean.len(),
            DensityFamily::UniformBox { lower, .. } => lower.len(),
            DensityFamily::ScaledBeta { .. } | DensityFamily::Arcsine { .. } => 1,
            DensityFamily::DiracMixture { locations, .. } => locations[0].len(),
            DensityFamily::Empirical(e) => e.dim(),
        }
    }

    /// Mean vector.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            DensityFamily::Gaussian { mean, .. } => mean.clone(),
            DensityFamily::UniformBox { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()
            }
            DensityFamily::ScaledBeta { alpha, beta, a, b } => {
                vec![a + (b - a) * alpha / (alpha + beta)]
            }
            DensityFamily::Arcsine { a, b } => vec![0.5 * (a + b)],
            DensityFamily::DiracMixture { locations, masses } => {
                let mut m = vec![0.0; locations[0].len()];
                for (l, w) in locations.iter().zip(masses) {
                    for (mi, li) in m.iter_mut().zip(l) {
                        *mi += w * li;
                    }
                }
                m
            }
            DensityFamily::Empirical(e) => e.mean(),
        }
    }

    /// Probability density at `x`. Dirac mixtures and empirical ensembles
    /// have no density and are rejected.
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        match self {
            DensityFamily::Gaussian { mean, cov } => {
                let d = mean.len();
                let c = from_rows(cov)?;
                let chol = c
                    .cholesky()
                    .ok_or_else(|| Error::Singular("Gaussian covariance has no density".into()))?;
                let diff = DVector::from_iterator(d, x.iter().zip(mean).map(|(a, b)| a - b));
                let z = chol.l().solve_lower_triangular(&diff).expect("triangular solve");
                let logdet: f64 = chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
                let q = z.norm_squared();
                Ok((-0.5 * (q + logdet + d as f64 * (2.0 * std::f64::consts::PI).ln())).exp())
            }
            DensityFamily::UniformBox { lower, upper } => {
                let mut vol = 1.0;
                for ((xi, l), u) in x.iter().zip(lower).zip(upper) {
                    if xi < l || xi > u {
                        return Ok(0.0);
                    }
                    vol *= u - l;
                }
                Ok(1.0 / vol)
            }
            DensityFamily::ScaledBeta { alpha, beta, a, b } => {
                Ok(beta_pdf(*alpha, *beta, (x[0] - a) / (b - a)) / (b - a))
            }
            DensityFamily::Arcsine { a, b } => {
                if x[0] <= *a || x[0] >= *b {
                    return Ok(if x[0] == *a || x[0] == *b { f64::INFINITY } else { 0.0 });
                }
                Ok(1.0 / (std::f64::consts::PI * ((x[0] - a) * (b - x[0])).sqrt()))
            }
            DensityFamily::DiracMixture { .. } | DensityFamily::Empirical(_) => Err(
                Error::Unsupported("density evaluation of an atomic measure".into()),
            ),
        }
    }

    /// Draw `n` equally weighted points.
    ///
    /// Halton sampling starts at sequence index 1 and ignores `seed`.
    pub fn sample(&self, n: usize, seed: u64, scheme: Scheme) -> Result<ParticleEnsemble> {
        if n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        let d = self.dim();
        let draw_dim = match self {
            DensityFamily::DiracMixture { .. } => 1,
            _ => d,
        };
        if scheme == Scheme::Halton && draw_dim > halton::max_dim() {
            return Err(Error::Unsupported(format!(
                "Halton sampling in dimension {draw_dim}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniforms = |i: usize| -> Vec<f64> {
            match scheme {
                Scheme::Halton => halton::point(i as u64 + 1, draw_dim),
                Scheme::Pseudo => (0..draw_dim).map(|_| rng.random::<f64>()).collect(),
            }
        };
        let mut pts = Vec::with_capacity(n * d);
        match self {
            DensityFamily::Gaussian { mean, cov } => {
                let root = gaussian_root(cov)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for i in 0..n {
                    let z: Vec<f64> = match scheme {
                        Scheme::Halton => halton::point(i as u64 + 1, d)
                            .into_iter()
                            .map(norm_quantile)
                            .collect(),
                        Scheme::Pseudo => (0..d).map(|_| rng.sample(StandardNormal)).collect(),
                    };
                    let z = DVector::from_vec(z);
                    let x = &root * z;
                    pts.extend(x.iter().zip(mean).map(|(v, m)| v + m));
                }
            }
            DensityFamily::UniformBox { lower, upper } => {
                for i in 0..n {
                    let u = uniforms(i);
                    pts.extend(u.iter().zip(lower).zip(upper).map(|((u, l), h)| l + (h - l) * u));
                }
            }
            DensityFamily::ScaledBeta { alpha, beta, a, b } => match scheme {
                Scheme::Halton => {
                    for i in 0..n {
                        let u = uniforms(i)[0];
                        pts.push(a + (b - a) * inv_beta_reg(*alpha, *beta, u));
                    }
                }
                Scheme::Pseudo => {
                    let dist = Beta::new(*alpha, *beta)
                        .map_err(|e| Error::invalid(format!("beta law: {e}")))?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..n {
                        let v: f64 = rng.sample(dist);
                        pts.push(a + (b - a) * v);
                    }
                }
            },
            DensityFamily::Arcsine { a, b } => {
                for i in 0..n {
                    let u = uniforms(i)[0];
                    let s = (std::f64::consts::FRAC_PI_2 * u).sin();
                    pts.push(a + (b - a) * s * s);
                }
            }
            DensityFamily::DiracMixture { locations, masses } => {
                let mut cum = Vec::with_capacity(masses.len());
                let mut acc = 0.0;
                for m in masses {
                    acc += m;
                    cum.push(acc);
                }
                for i in 0..n {
                    let u = uniforms(i)[0] * acc;
                    let k = cum.partition_point(|c| *c <= u).min(masses.len() - 1);
                    pts.extend_from_slice(&locations[k]);
                }
            }
            DensityFamily::Empirical(_) => {
                return Err(Error::Unsupported("sampling an empirical ensemble".into()))
            }
        }
        ParticleEnsemble::from_flat(d, pts, None)
    }
}

fn gaussian_root(cov: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let c = from_rows(cov)?;
    match c.clone().cholesky() {
        Some(ch) => Ok(ch.l()),
        None => sqrtm_psd(&c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_uniform_box() {
        let pi = std::f64::consts::PI;
        let f = DensityFamily::uniform(vec![-pi, -pi], vec![pi, pi]).unwrap();
        let e = f.sample(1000, 0, Scheme::Halton).unwrap();
        assert_eq!(e.len(), 1000);
        assert!(e.weights().iter().all(|w| (*w - 1e-3).abs() < 1e-18));
        assert!(e.iter().all(|(p, _)| p.iter().all(|v| v.abs() <= pi)));
    }

    #[test]
    fn single_gaussian_point() {
        let f = DensityFamily::isotropic(vec![0.0, 0.0], 1.0).unwrap();
        let e = f.sample(1, 3, Scheme::Pseudo).unwrap();
        assert_eq!(e.weights(), &[1.0]);
    }

    #[test]
    fn beta_sample_mean() {
        let f = DensityFamily::scaled_beta(4.0, 1.5, 0.0, 1.0).unwrap();
        let e = f.sample(100_000, 7, Scheme::Pseudo).unwrap();
        let m = e.mean()[0];
        let (a, b) = (4.0, 1.5);
        let var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
        let se = (var / 1e5_f64).sqrt();
        assert!((m - 8.0 / 11.0).abs() < 3.0 * se, "{m}");
    }

    #[test]
    fn empirical_sampling_rejected() {
        let e = ParticleEnsemble::dirac(vec![1.0]).unwrap();
        assert!(DensityFamily::Empirical(e).sample(3, 0, Scheme::Pseudo).is_err());
    }

    #[test]
    fn gaussian_pdf_normalized_in_1d() {
        let f = DensityFamily::gaussian(vec![1.0], vec![vec![4.0]]).unwrap();
        let v = f.pdf(&[1.0]).unwrap();
        assert!((v - 1.0 / (8.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
    }
}
