use super::{DensityFamily, ParticleEnsemble};
use crate::special::{digamma, ln_beta};
use crate::{Error, Result};

/// Raw moment of order 1 or 2 of a one-dimensional family.
pub fn raw_moment(source: &DensityFamily, order: u32) -> Result<f64> {
    if source.dim() != 1 {
        return Err(Error::Unsupported("raw moments of multivariate densities".into()));
    }
    if !(1..=2).contains(&order) {
        return Err(Error::invalid("moment order must be 1 or 2"));
    }
    let second = order == 2;
    Ok(match source {
        DensityFamily::Gaussian { mean, cov } => {
            if second {
                mean[0] * mean[0] + cov[0][0]
            } else {
                mean[0]
            }
        }
        DensityFamily::UniformBox { lower, upper } => {
            let (a, b) = (lower[0], upper[0]);
            if second {
                (a * a + b * b + a * b) / 3.0
            } else {
                0.5 * (a + b)
            }
        }
        DensityFamily::ScaledBeta { alpha, beta, a, b } => {
            let s = alpha + beta;
            let e1 = alpha / s;
            let e2 = alpha * (alpha + 1.0) / (s * (s + 1.0));
            let w = b - a;
            if second {
                a * a + 2.0 * a * w * e1 + w * w * e2
            } else {
                a + w * e1
            }
        }
        DensityFamily::Arcsine { a, b } => {
            if second {
                (3.0 * a * a + 3.0 * b * b + 2.0 * a * b) / 8.0
            } else {
                0.5 * (a + b)
            }
        }
        DensityFamily::DiracMixture { locations, masses } => locations
            .iter()
            .zip(masses)
            .map(|(l, m)| m * l[0].powi(order as i32))
            .sum(),
        DensityFamily::Empirical(e) => raw_moment_ensemble(e, order)?,
    })
}

/// Weighted raw moment of a one-dimensional ensemble.
pub fn raw_moment_ensemble(e: &ParticleEnsemble, order: u32) -> Result<f64> {
    if e.dim() != 1 {
        return Err(Error::Unsupported("raw moments of multivariate ensembles".into()));
    }
    Ok(e.iter().map(|(p, w)| w * p[0].powi(order as i32)).sum())
}

/// Differential entropy of the Beta(alpha, beta) law on `[0, 1]`.
pub fn beta_entropy(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::invalid("beta parameters must be positive"));
    }
    let psi_ab = digamma(alpha + beta);
    Ok(ln_beta(alpha, beta)
        - (alpha - 1.0) * (digamma(alpha) - psi_ab)
        - (beta - 1.0) * (digamma(beta) - psi_ab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadConfig};
    use crate::special::beta_pdf;

    #[test]
    fn uniform_and_arcsine_moments() {
        let (a, b) = (-1.3, 2.2);
        let u = DensityFamily::uniform(vec![a], vec![b]).unwrap();
        let s = DensityFamily::arcsine(a, b).unwrap();
        let sb = DensityFamily::scaled_beta(0.5, 0.5, a, b).unwrap();
        let mu = raw_moment(&u, 2).unwrap();
        let ms = raw_moment(&s, 2).unwrap();
        assert!((mu - (a * a + b * b + a * b) / 3.0).abs() < 1e-15);
        assert!((ms - raw_moment(&sb, 2).unwrap()).abs() < 1e-14);
        assert!(ms > mu);
    }

    #[test]
    fn entropy_examples() {
        assert!(beta_entropy(1.0, 1.0).unwrap().abs() < 1e-15);
        let (x, y) = (beta_entropy(4.0, 1.5).unwrap(), beta_entropy(1.5, 4.0).unwrap());
        assert!((x - y).abs() < 1e-12);
        let q = integrate(
            |x| {
                let p = beta_pdf(2.0, 2.0, x);
                if p > 0.0 {
                    -p * p.ln()
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((q - beta_entropy(2.0, 2.0).unwrap()).abs() < 1e-8);
        assert!(beta_entropy(0.0, 1.0).is_err());
    }
}
