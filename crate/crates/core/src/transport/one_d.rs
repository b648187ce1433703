use crate::densities::Cdf1D;
use crate::quadrature::{integrate_pieces, QuadConfig};
use crate::Result;

/// Order-2 Wasserstein distance between two one-dimensional laws,
/// `sqrt(int_0^1 (F^-1(s) - G^-1(s))^2 ds)`.
///
/// Two step CDFs are integrated exactly over their merged mass levels;
/// otherwise adaptive Gauss–Legendre quadrature is applied between the jump
/// levels of either quantile function.
pub fn w2_1d(f: &Cdf1D, g: &Cdf1D, cfg: &QuadConfig) -> Result<f64> {
    if let (Cdf1D::Step { xs: xa, cum: ca }, Cdf1D::Step { xs: xb, cum: cb }) = (f, g) {
        return Ok(step_w2_sq(xa, ca, xb, cb).max(0.0).sqrt());
    }
    if let (Cdf1D::Gaussian { mean: m1, sd: s1 }, Cdf1D::Gaussian { mean: m2, sd: s2 }) = (f, g) {
        return Ok((m1 - m2).hypot(s1 - s2));
    }
    let mut breaks = vec![0.0, 1.0];
    breaks.extend(f.jump_levels());
    breaks.extend(g.jump_levels());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let v = integrate_pieces(
        |s| {
            // unbounded quantiles are finite one ulp inside (0, 1)
            let s = s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
            let a = f.quantile(s).unwrap_or(f64::NAN);
            let b = g.quantile(s).unwrap_or(f64::NAN);
            (a - b) * (a - b)
        },
        &breaks,
        cfg,
    )?;
    Ok(v.max(0.0).sqrt())
}

fn step_w2_sq(xa: &[f64], ca: &[f64], xb: &[f64], cb: &[f64]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    let mut acc = 0.0;
    while i < xa.len() && j < xb.len() {
        let level = ca[i].min(cb[j]);
        let d = xa[i] - xb[j];
        acc += (level - prev) * d * d;
        prev = level;
        if ca[i] <= level {
            i += 1;
        }
        if cb[j] <= level {
            j += 1;
        }
    }
    acc
}

/// Optimal coupling CDF `min(F(y), G(yhat))`.
pub fn coupling_cdf(f: &Cdf1D, g: &Cdf1D, y: f64, y_hat: f64) -> f64 {
    f.eval(y).min(g.eval(y_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{cdf, DensityFamily};

    #[test]
    fn spec_examples() {
        let cfg = QuadConfig::default();
        let u1 = cdf(&DensityFamily::uniform(vec![0.0], vec![1.0]).unwrap()).unwrap();
        let u2 = cdf(&DensityFamily::uniform(vec![1.0], vec![2.0]).unwrap()).unwrap();
        assert!((w2_1d(&u1, &u2, &cfg).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(w2_1d(&u1, &u1, &cfg).unwrap(), 0.0);
        let cheb = cdf(&DensityFamily::arcsine(-1.0, 1.0).unwrap()).unwrap();
        let logi = cdf(&DensityFamily::arcsine(0.0, 1.0).unwrap()).unwrap();
        let v = w2_1d(&cheb, &logi, &cfg).unwrap();
        assert!((v - (3.0f64 / 8.0).sqrt()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn step_against_continuous_path() {
        let e = crate::densities::ParticleEnsemble::new(
            vec![vec![0.0], vec![1.0], vec![3.0]],
            Some(vec![0.2, 0.5, 0.3]),
        )
        .unwrap();
        let s = Cdf1D::from_ensemble(&e).unwrap();
        let u = cdf(&DensityFamily::uniform(vec![0.0], vec![2.0]).unwrap()).unwrap();
        // exact: pieces (0,.2): Q=2s vs 0; (.2,.7): 2s vs 1; (.7,1): 2s vs 3
        let exact: f64 = (4.0 * 0.2f64.powi(3) / 3.0)
            + ((2.0 * 0.7 - 1.0f64).powi(3) - (2.0 * 0.2 - 1.0f64).powi(3)) / 6.0
            + ((2.0 * 1.0 - 3.0f64).powi(3) - (2.0 * 0.7 - 3.0f64).powi(3)) / 6.0;
        let v = w2_1d(&s, &u, &QuadConfig::default()).unwrap();
        assert!((v * v - exact).abs() < 1e-12, "{} {}", v * v, exact);
    }
}
