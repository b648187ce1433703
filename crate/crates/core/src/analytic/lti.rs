use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{fro, spectral_radius, sqrtm_from_factor, sqrtm_psd, symmetrize};
use crate::transport::bures_sq_factors;
use crate::{Error, Result};

/// Two discrete-time LTI systems `x+ = A x`, `x+ = A_hat x` started from
/// `N(0, P0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiPair {
    pub a: DMatrix<f64>,
    pub a_hat: DMatrix<f64>,
    pub p0: DMatrix<f64>,
}

/// Exact gap and its two upper bounds at step `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LtiBounds {
    pub k: u32,
    pub w2: f64,
    /// `sqrt(2) tr(P0)^{1/2} ||A_hat^{-k}||_F Omega(k)`; `None` when `A_hat`
    /// is singular or the radicand of `Omega` is negative.
    pub omega_bound: Option<f64>,
    /// `||P_k^{1/2} - P_hat_k^{1/2}||_F`.
    pub sharper: f64,
}

impl LtiPair {
    pub fn new(a: DMatrix<f64>, a_hat: DMatrix<f64>, p0: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        for m in [&a, &a_hat, &p0] {
            if m.shape() != (n, n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.nrows(),
                });
            }
        }
        if spectral_radius(&a) >= 1.0 || spectral_radius(&a_hat) >= 1.0 {
            return Err(Error::invalid("LTI pair must be Schur stable"));
        }
        if (&p0 - p0.transpose()).amax() > 1e-12 * p0.amax().max(1.0) {
            return Err(Error::invalid("P0 must be symmetric"));
        }
        if p0.clone().cholesky().is_none() {
            return Err(Error::invalid("P0 must be positive definite"));
        }
        Ok(LtiPair { a, a_hat, p0 })
    }

    /// `(P_k, P_hat_k)`.
    pub fn covariances(&self, k: u32) -> (DMatrix<f64>, DMatrix<f64>) {
        let ak = self.a.pow(k);
        let bk = self.a_hat.pow(k);
        (
            symmetrize(&(&ak * &self.p0 * ak.transpose())),
            symmetrize(&(&bk * &self.p0 * bk.transpose())),
        )
    }
}

/// Exact `W2(k)` with both upper bounds.
///
/// The log-product of the spectra is evaluated as
/// `2k (ln|det A| - ln|det A_hat|)`, i.e. with eigenvalue moduli.
pub fn lti_bounds(pair: &LtiPair, k: u32) -> Result<LtiBounds> {
    let n = pair.a.nrows();
    // work with the factors A^k P0^{1/2}; forming P_k first loses the
    // small eigenvalues before the square root is taken
    let l0 = sqrtm_psd(&pair.p0)?;
    let fk = pair.a.pow(k) * &l0;
    let fhk = pair.a_hat.pow(k) * &l0;
    let w2 = bures_sq_factors(&fk, &fhk)?.sqrt();
    let sharper = fro(&(sqrtm_from_factor(&fk)? - sqrtm_from_factor(&fhk)?));

    let omega_bound = pair.a_hat.clone().try_inverse().and_then(|inv| {
        let inv_k = inv.pow(k);
        let tr = pair.p0.trace();
        let ak = fro(&pair.a.pow(k));
        let bk = fro(&inv_k);
        let log_prod = 2.0 * k as f64 * (pair.a.determinant().abs().ln() - pair.a_hat.determinant().abs().ln());
        let rad = ak * ak * bk * bk * tr * tr - log_prod - n as f64;
        if rad.is_nan() || rad < 0.0 {
            None
        } else {
            Some(2f64.sqrt() * tr.sqrt() * bk * rad.sqrt())
        }
    });
    Ok(LtiBounds {
        k,
        w2,
        omega_bound,
        sharper,
    })
}
