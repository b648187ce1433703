use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::symmetrize;
use crate::quadrature::{integrate, QuadConfig};
use crate::{Error, Result};

/// KL divergence versus W2 for two Gaussians sharing a covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlDiagnostic {
    pub kl: f64,
    pub w2: f64,
    /// `kl / w2`; `None` for equal means.
    pub ratio: Option<f64>,
    /// `||m|| / (2 lambda_max)`.
    pub lower: f64,
    /// `||m|| / (2 lambda_min)`.
    pub upper: f64,
}

pub fn gaussian_kl_diag(
    m1: &DVector<f64>,
    m2: &DVector<f64>,
    sigma: &DMatrix<f64>,
) -> Result<KlDiagnostic> {
    let d = m1.len();
    if m2.len() != d || sigma.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m2.len(),
        });
    }
    let s = symmetrize(sigma);
    let chol = s
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("covariance is not positive definite".into()))?;
    let m = m2 - m1;
    let kl = 0.5 * m.dot(&chol.solve(&m));
    let w2 = m.norm();
    let eig = s.symmetric_eigenvalues();
    let lmin = eig.min();
    let lmax = eig.max();
    Ok(KlDiagnostic {
        kl,
        w2,
        ratio: (w2 > 0.0).then(|| kl / w2),
        lower: w2 / (2.0 * lmax),
        upper: w2 / (2.0 * lmin),
    })
}

/// Sign class of `E[log zeta]` for the multiplicative-noise logistic map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseClass {
    /// Negative: iterates go to zero almost surely.
    AsZero,
    /// Zero: iterates go to zero in probability.
    IpZero,
    /// Positive: a stationary density exists.
    StationaryExists,
}

/// Noise law on `[0, 4]`.
pub enum NoiseLaw<'a> {
    Density(&'a dyn Fn(f64) -> f64),
    PointMass(f64),
}

/// `E[log zeta]` and its sign class. Values within `1e-12` of zero count as
/// zero.
pub fn log_noise_sign(law: NoiseLaw<'_>) -> Result<(f64, NoiseClass)> {
    let v = match law {
        NoiseLaw::PointMass(z) => {
            if !(z > 0.0 && z <= 4.0) {
                return Err(Error::invalid("noise atom must lie in (0, 4]"));
            }
            z.ln()
        }
        NoiseLaw::Density(phi) => {
            // zeta = u^2 removes the log singularity at zeta = 0
            let f = |u: f64| 4.0 * u * u.ln() * phi(u * u);
            let cfg = QuadConfig::default();
            integrate(f, 0.0, 1.0, &cfg)? + integrate(f, 1.0, 2.0, &cfg)?
        }
    };
    let class = if v.abs() <= 1e-12 {
        NoiseClass::IpZero
    } else if v < 0.0 {
        NoiseClass::AsZero
    } else {
        NoiseClass::StationaryExists
    };
    Ok((v, class))
}
