use nalgebra::{DMatrix, DVector};

use super::gaussian::bures_sq;
use super::w2_lp;
use crate::densities::ParticleEnsemble;
use crate::linalg::lyapunov;
use crate::{Error, Result};

/// Pairs of stable systems with known stationary output densities.
#[derive(Debug, Clone)]
pub enum AsymptoticCase {
    /// `x' = Ax, y = Cx` against `x' = Âx, ŷ = Ĉx`: both settle at the origin.
    DeterministicLinear,
    /// `x' = Ax + b, y = Cx + d` and its hatted counterpart.
    Affine {
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: DMatrix<f64>,
        d: DVector<f64>,
        a_hat: DMatrix<f64>,
        b_hat: DVector<f64>,
        c_hat: DMatrix<f64>,
        d_hat: DVector<f64>,
    },
    /// `dx = Ax dt + B dβ, y = Cx` with noise covariance `Q`, and its hatted
    /// counterpart.
    StochasticLinear {
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        q: DMatrix<f64>,
        c: DMatrix<f64>,
        a_hat: DMatrix<f64>,
        b_hat: DMatrix<f64>,
        q_hat: DMatrix<f64>,
        c_hat: DMatrix<f64>,
    },
    /// Nonlinear truth settling on output equilibria `points` with `masses`,
    /// against a stable linear model settling at the origin.
    NonlinearVsLinear {
        points: Vec<Vec<f64>>,
        masses: Vec<f64>,
    },
    /// Two nonlinear systems, each settling on a Dirac mixture.
    NonlinearPair {
        points: Vec<Vec<f64>>,
        masses: Vec<f64>,
        points_hat: Vec<Vec<f64>>,
        masses_hat: Vec<f64>,
    },
}

/// Wasserstein distance between the stationary output densities of a pair.
pub fn asymptotic_gap(case: &AsymptoticCase) -> Result<f64> {
    match case {
        AsymptoticCase::DeterministicLinear => Ok(0.0),
        AsymptoticCase::Affine {
            a,
            b,
            c,
            d,
            a_hat,
            b_hat,
            c_hat,
            d_hat,
        } => {
            let ainv_b = a
                .clone()
                .lu()
                .solve(b)
                .ok_or_else(|| Error::Singular("A in affine pair".into()))?;
            let ahinv_b = a_hat
                .clone()
                .lu()
                .solve(b_hat)
                .ok_or_else(|| Error::Singular("Â in affine pair".into()))?;
            let v = (d - d_hat) - (c * ainv_b - c_hat * ahinv_b);
            Ok(v.norm())
        }
        AsymptoticCase::StochasticLinear {
            a,
            b,
            q,
            c,
            a_hat,
            b_hat,
            q_hat,
            c_hat,
        } => {
            let sx = lyapunov(a, &(b * q * b.transpose()))?;
            let sxh = lyapunov(a_hat, &(b_hat * q_hat * b_hat.transpose()))?;
            let sy = c * sx * c.transpose();
            let syh = c_hat * sxh * c_hat.transpose();
            if sy.shape() != syh.shape() {
                return Err(Error::DimensionMismatch {
                    expected: sy.nrows(),
                    got: syh.nrows(),
                });
            }
            Ok(bures_sq(&sy, &syh)?.sqrt())
        }
        AsymptoticCase::NonlinearVsLinear { points, masses } => {
            let mix = ParticleEnsemble::new(points.clone(), Some(masses.clone()))?;
            Ok(mix
                .iter()
                .map(|(p, w)| w * p.iter().map(|v| v * v).sum::<f64>())
                .sum::<f64>()
                .sqrt())
        }
        AsymptoticCase::NonlinearPair {
            points,
            masses,
            points_hat,
            masses_hat,
        } => {
            let x = ParticleEnsemble::new(points.clone(), Some(masses.clone()))?;
            let y = ParticleEnsemble::new(points_hat.clone(), Some(masses_hat.clone()))?;
            Ok(w2_lp(&x, &y)?.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_row() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let ah = DMatrix::from_row_slice(2, 2, &[-3.0, 1.0, 0.0, -1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let bh = DVector::from_vec(vec![0.5, -1.0]);
        let eye = DMatrix::identity(2, 2);
        let z = DVector::zeros(2);
        let case = AsymptoticCase::Affine {
            a: a.clone(),
            b: b.clone(),
            c: eye.clone(),
            d: z.clone(),
            a_hat: ah.clone(),
            b_hat: bh.clone(),
            c_hat: eye,
            d_hat: z,
        };
        let expect = (a.try_inverse().unwrap() * b - ah.try_inverse().unwrap() * bh).norm();
        assert!((asymptotic_gap(&case).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn nonlinear_vs_linear_matches_lp() {
        let pts = vec![vec![0.0, 0.0], vec![2.8396, 0.0], vec![-2.8396, 0.0]];
        let ms = vec![0.5, 0.25, 0.25];
        let r4 = asymptotic_gap(&AsymptoticCase::NonlinearVsLinear {
            points: pts.clone(),
            masses: ms.clone(),
        })
        .unwrap();
        let r5 = asymptotic_gap(&AsymptoticCase::NonlinearPair {
            points: pts,
            masses: ms,
            points_hat: vec![vec![0.0, 0.0]],
            masses_hat: vec![1.0],
        })
        .unwrap();
        assert!((r4 - r5).abs() < 1e-12);
        assert!((r4 - 2.8396 * 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn scalar_stochastic_row() {
        let m = |v: f64| DMatrix::from_element(1, 1, v);
        let case = AsymptoticCase::StochasticLinear {
            a: m(-1.0),
            b: m(1.0),
            q: m(1.0),
            c: m(1.0),
            a_hat: m(-2.0),
            b_hat: m(1.0),
            q_hat: m(1.0),
            c_hat: m(1.0),
        };
        let expect = (0.5f64.sqrt() - 0.25f64.sqrt()).abs();
        assert!((asymptotic_gap(&case).unwrap() - expect).abs() < 1e-12);
    }
}
