use nalgebra::{DMatrix, DVector};

use crate::densities::DensityFamily;
use crate::linalg::{from_rows, sqrtm_psd, svd_jacobi};
use crate::{Error, Result};

/// Closed-form order-2 Wasserstein distance between two Gaussians.
pub fn w2_gaussian(g1: &DensityFamily, g2: &DensityFamily) -> Result<f64> {
    let (m1, s1) = gaussian_parts(g1)?;
    let (m2, s2) = gaussian_parts(g2)?;
    w2_gaussian_moments(&m1, &s1, &m2, &s2)
}

fn gaussian_parts(g: &DensityFamily) -> Result<(DVector<f64>, DMatrix<f64>)> {
    match g {
        DensityFamily::Gaussian { mean, cov } => {
            Ok((DVector::from_column_slice(mean), from_rows(cov)?))
        }
        _ => Err(Error::invalid("w2_gaussian needs Gaussian densities")),
    }
}

/// Same as [`w2_gaussian`] from means and covariances.
pub fn w2_gaussian_moments(
    m1: &DVector<f64>,
    s1: &DMatrix<f64>,
    m2: &DVector<f64>,
    s2: &DMatrix<f64>,
) -> Result<f64> {
    let d = m1.len();
    if m2.len() != d || s1.shape() != (d, d) || s2.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m2.len(),
        });
    }
    let mean_term = (m1 - m2).norm_squared();
    if s1 == s2 {
        crate::linalg::check_psd(s1)?;
        return Ok(mean_term.sqrt());
    }
    Ok((mean_term + bures_sq(s1, s2)?).max(0.0).sqrt())
}

/// `tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2)`.
///
/// Evaluated as `||S1^1/2 - S2^1/2 U||_F^2` with `U` the orthogonal polar
/// factor of `S2^1/2 S1^1/2`, which equals the trace form but does not
/// cancel when the two covariances are close.
pub fn bures_sq(s1: &DMatrix<f64>, s2: &DMatrix<f64>) -> Result<f64> {
    bures_sq_factors(&sqrtm_psd(s1)?, &sqrtm_psd(s2)?)
}

/// Squared Bures distance between `F1 F1^T` and `F2 F2^T` for square
/// factors, `min_U ||F1 - F2 U||_F^2` over orthogonal `U`.
pub fn bures_sq_factors(f1: &DMatrix<f64>, f2: &DMatrix<f64>) -> Result<f64> {
    if !f1.is_square() || f1.shape() != f2.shape() {
        return Err(Error::DimensionMismatch {
            expected: f1.nrows(),
            got: f2.nrows(),
        });
    }
    let (w, _, v) = svd_jacobi(&(f2.transpose() * f1))?;
    Ok((f1 - f2 * (w * v.transpose())).norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_homoscedastic() {
        let a = DensityFamily::gaussian(vec![0.0], vec![vec![1.0]]).unwrap();
        let b = DensityFamily::gaussian(vec![0.0], vec![vec![4.0]]).unwrap();
        assert!((w2_gaussian(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        let cov = vec![vec![2.0, 0.3], vec![0.3, 1.0]];
        let c = DensityFamily::gaussian(vec![1.0, 2.0], cov.clone()).unwrap();
        let d = DensityFamily::gaussian(vec![-1.0, 0.5], cov).unwrap();
        assert!((w2_gaussian(&c, &d).unwrap() - (4.0f64 + 2.25).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_indefinite() {
        let s1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-3]);
        let s2 = DMatrix::identity(2, 2);
        let m = DVector::zeros(2);
        assert!(w2_gaussian_moments(&m, &s1, &m, &s2).is_err());
    }
}
