use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::densities::Cdf1D;
use crate::quadrature::{integrate_pieces, QuadConfig};
use crate::special::{norm_cdf, norm_pdf};
use crate::{Error, Result};

/// Two scalar systems `x' = a_i x + b_i (+ g_i dW)`, `y = c_i x + d_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarLinearPair {
    pub a1: f64,
    pub c1: f64,
    pub a2: f64,
    pub c2: f64,
    #[serde(default)]
    pub b1: f64,
    #[serde(default)]
    pub d1: f64,
    #[serde(default)]
    pub b2: f64,
    #[serde(default)]
    pub d2: f64,
    /// Diffusion magnitudes `|b_i|` of the stochastic variant.
    #[serde(default)]
    pub g1: f64,
    #[serde(default)]
    pub g2: f64,
}

impl ScalarLinearPair {
    pub fn new(a1: f64, c1: f64, a2: f64, c2: f64) -> Result<Self> {
        let p = ScalarLinearPair {
            a1,
            c1,
            a2,
            c2,
            b1: 0.0,
            d1: 0.0,
            b2: 0.0,
            d2: 0.0,
            g1: 0.0,
            g2: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_affine(mut self, b1: f64, d1: f64, b2: f64, d2: f64) -> Self {
        self.b1 = b1;
        self.d1 = d1;
        self.b2 = b2;
        self.d2 = d2;
        self
    }

    pub fn with_diffusion(mut self, g1: f64, g2: f64) -> Self {
        self.g1 = g1;
        self.g2 = g2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.a1, self.c1, self.a2, self.c2, self.b1, self.d1, self.b2, self.d2, self.g1, self.g2,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite system coefficient"));
        }
        if !(self.a1 < 0.0 && self.a2 < 0.0) {
            return Err(Error::invalid("scalar systems must be stable (a_i < 0)"));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::invalid("output gains must be positive (c_i > 0)"));
        }
        Ok(())
    }

    /// `c1 e^{a1 t} - c2 e^{a2 t}`.
    pub fn p(&self, t: f64) -> f64 {
        self.c1 * (self.a1 * t).exp() - self.c2 * (self.a2 * t).exp()
    }

    /// Affine offset of the output quantile difference.
    pub fn q(&self, t: f64) -> f64 {
        self.b1 * self.c1 / self.a1 * (self.a1 * t).exp_m1()
            - self.b2 * self.c2 / self.a2 * (self.a2 * t).exp_m1()
            + (self.d1 - self.d2)
    }

    /// Difference of the scaled noise standard deviations.
    pub fn r(&self, t: f64) -> f64 {
        let s = |a: f64, g: f64, c: f64| g.abs() * c * ((2.0 * a * t).exp_m1() / (2.0 * a)).sqrt();
        s(self.a1, self.g1, self.c1) - s(self.a2, self.g2, self.c2)
    }
}

/// `sqrt(m20) |c1 e^{a1 t} - c2 e^{a2 t}|`.
pub fn w2_scalar_linear(pair: &ScalarLinearPair, m20: f64, t: f64) -> Result<f64> {
    pair.validate()?;
    if !(m20 >= 0.0) {
        return Err(Error::invalid("second raw moment must be nonnegative"));
    }
    Ok(m20.sqrt() * pair.p(t).abs())
}

/// Discrete-time analogue `sqrt(m20) |c1 a1^k - c2 a2^k|` (no sign
/// restriction on `a_i`).
pub fn w2_scalar_discrete(a1: f64, c1: f64, a2: f64, c2: f64, m20: f64, k: u32) -> Result<f64> {
    if !(m20 >= 0.0) {
        return Err(Error::invalid("second raw moment must be nonnegative"));
    }
    Ok(m20.sqrt() * (c1 * a1.powi(k as i32) - c2 * a2.powi(k as i32)).abs())
}

/// Gap of the affine pair from the first two raw moments of the initial law.
pub fn w2_scalar_affine(pair: &ScalarLinearPair, m10: f64, m20: f64, t: f64) -> Result<f64> {
    pair.validate()?;
    if !(m20 >= m10 * m10 - 1e-12 * m20.abs().max(1.0)) {
        return Err(Error::invalid("raw moments violate m20 >= m10^2"));
    }
    let (p, q) = (pair.p(t), pair.q(t));
    Ok((p * p * m20 + 2.0 * p * q * m10 + q * q).max(0.0).sqrt())
}

/// Gap of the stochastic pair, `sqrt(p^2 m20 + 2 p r s + r^2)`.
///
/// The formula adds the quantile of the initial state and of the noise term
/// as if they were comonotone, so it is exact only when one of the two is
/// degenerate (`g_i = 0` or a point-mass initial law).
pub fn w2_scalar_sde(pair: &ScalarLinearPair, m20: f64, s_f0: f64, t: f64) -> Result<f64> {
    pair.validate()?;
    if !(m20 >= 0.0) {
        return Err(Error::invalid("second raw moment must be nonnegative"));
    }
    if t < 0.0 {
        return Err(Error::invalid("time must be nonnegative"));
    }
    let (p, r) = (pair.p(t), pair.r(t));
    Ok((p * p * m20 + 2.0 * p * r * s_f0 + r * r).max(0.0).sqrt())
}

/// `s(F0) = E[x0 Phi^{-1}(F0(x0))] = int_0^1 Q0(u) Phi^{-1}(u) du`,
/// evaluated as `int z Q0(Phi(z)) phi(z) dz` over `|z| <= 10`.
pub fn s_statistic(f0: &Cdf1D) -> Result<f64> {
    let err = RefCell::new(None);
    let v = integrate_pieces(
        |z| match f0.quantile(norm_cdf(z)) {
            Ok(q) if q.is_finite() => z * q * norm_pdf(z),
            Ok(_) => 0.0,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        &[-10.0, -5.0, 0.0, 5.0, 10.0],
        &QuadConfig::default(),
    )?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(v)
}
