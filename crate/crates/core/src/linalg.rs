//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Symmetrise a square matrix.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Principal square root of a symmetric positive semidefinite matrix.
///
/// Eigenvalues within `-1e-10 * max(1, |lambda|_max)` of zero are clamped to
/// zero; more negative eigenvalues are rejected.
pub fn sqrtm_psd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::invalid("matrix square root needs a square matrix"));
    }
    let eig = symmetrize(a).symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut d = eig.eigenvalues.clone();
    for v in d.iter_mut() {
        if *v < 0.0 {
            if *v < -1e-10 * scale {
                return Err(Error::invalid(format!(
                    "matrix is not positive semidefinite (eigenvalue {v})"
                )));
            }
            *v = 0.0;
        }
        *v = v.sqrt();
    }
    let q = &eig.eigenvectors;
    Ok(symmetrize(&(q * DMatrix::from_diagonal(&d) * q.transpose())))
}

/// Singular value decomposition `A = U diag(s) V^T` of a square matrix by
/// one-sided Jacobi rotations.
///
/// Small singular values keep their relative accuracy, which the
/// bidiagonal QR in `nalgebra` does not guarantee for nearly rank-deficient
/// input. Columns of `U` for zero singular values are completed to an
/// orthonormal basis.
pub fn svd_jacobi(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    if !a.is_square() {
        return Err(Error::invalid("Jacobi SVD needs a square matrix"));
    }
    let n = a.ncols();
    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut converged = false;
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma = u.column(p).dot(&u.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut u, &mut v] {
                    for k in 0..n {
                        let (x, y) = (m[(k, p)], m[(k, q)]);
                        m[(k, p)] = c * x - s * y;
                        m[(k, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence("Jacobi SVD did not converge".into()));
    }
    let sigma = DVector::from_iterator(n, (0..n).map(|j| u.column(j).norm()));
    let mut zero = Vec::new();
    for j in 0..n {
        if sigma[j] > 0.0 {
            let col = u.column(j) / sigma[j];
            u.set_column(j, &col);
        } else {
            zero.push(j);
        }
    }
    // complete with standard basis vectors orthogonalized against the rest
    let mut e = 0;
    for j in zero {
        loop {
            let mut w = DVector::<f64>::zeros(n);
            w[e] = 1.0;
            e += 1;
            for k in 0..n {
                if k != j && (sigma[k] > 0.0 || u.column(k).norm() > 0.5) {
                    let proj = u.column(k).dot(&w);
                    w -= u.column(k) * proj;
                }
            }
            let nw = w.norm();
            if nw > 0.5 {
                u.set_column(j, &(w / nw));
                break;
            }
            if e >= n {
                return Err(Error::NonConvergence("Jacobi SVD basis completion".into()));
            }
        }
    }
    Ok((u, sigma, v))
}

/// `(F F^T)^{1/2}` from the SVD of `F`, without forming `F F^T`.
pub fn sqrtm_from_factor(f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (u, s, _) = svd_jacobi(f)?;
    Ok(symmetrize(&(&u * DMatrix::from_diagonal(&s) * u.transpose())))
}

/// Check that a symmetric matrix is positive semidefinite up to the same
/// clamping rule as [`sqrtm_psd`].
pub fn check_psd(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::invalid("covariance must be square"));
    }
    let asym = (a - a.transpose()).amax();
    if asym > 1e-10 * a.amax().max(1.0) {
        return Err(Error::invalid("covariance must be symmetric"));
    }
    sqrtm_psd(a).map(|_| ())
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn sym_eig_range(a: &DMatrix<f64>) -> (f64, f64) {
    let e = symmetrize(a).symmetric_eigen().eigenvalues;
    let lo = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// True when every eigenvalue has strictly negative real part.
pub fn is_hurwitz(a: &DMatrix<f64>) -> bool {
    a.complex_eigenvalues().iter().all(|z| z.re < 0.0)
}

/// Spectral radius.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues().iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Solve the continuous Lyapunov equation `A X + X A^T + Q = 0`.
pub fn lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !a.is_square() || q.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.nrows(),
        });
    }
    if !is_hurwitz(a) {
        return Err(Error::NotHurwitz("drift matrix has an eigenvalue with Re >= 0".into()));
    }
    let eye = DMatrix::<f64>::identity(n, n);
    let k = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -DVector::from_column_slice(q.as_slice());
    let lu = k.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Lyapunov operator".into()))?;
    // one step of iterative refinement
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let sol = symmetrize(&DMatrix::from_column_slice(n, n, x.as_slice()));
    let resid = (a * &sol + &sol * a.transpose() + q).amax();
    if resid > 1e-10 * q.amax().max(1.0) {
        return Err(Error::NonConvergence(format!("Lyapunov residual {resid:e}")));
    }
    Ok(sol)
}

/// Frobenius norm.
pub fn fro(a: &DMatrix<f64>) -> f64 {
    a.norm()
}

/// Build a matrix from row-major nested vectors.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    if rows.iter().any(|x| x.len() != c) {
        return Err(Error::invalid("ragged matrix rows"));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

/// Row-major nested vectors from a matrix.
pub fn to_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_svd_near_rank_deficient() {
        let (c, s) = (1.1f64.cos(), 1.1f64.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        for small in [0.7, 2.5e-13, 1e-300, 0.0] {
            let a = &rot * DMatrix::from_row_slice(2, 2, &[1.3, 0.0, 0.0, small]) * rot.transpose();
            let (u, sig, v) = svd_jacobi(&a).unwrap();
            let rec = &u * DMatrix::from_diagonal(&sig) * v.transpose();
            assert!((rec - &a).amax() < 1e-15);
            assert!((u.transpose() * &u - DMatrix::identity(2, 2)).amax() < 1e-15);
            let lo = sig.min();
            assert!((lo - small).abs() <= 1e-15, "{lo} vs {small}");
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let s = sqrtm_psd(&a).unwrap();
        assert!((&s * &s - &a).amax() < 1e-12);
    }

    #[test]
    fn lyapunov_residual_small() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.1, -1.0]);
        let q = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.5]);
        let x = lyapunov(&a, &q).unwrap();
        assert!((&a * &x + &x * a.transpose() + &q).amax() < 1e-12);
        let bad = DMatrix::from_row_slice(1, 1, &[0.1]);
        assert!(matches!(
            lyapunov(&bad, &DMatrix::identity(1, 1)),
            Err(Error::NotHurwitz(_))
        ));
    }
}
