use std::cell::RefCell;

use crate::quadrature::{integrate, QuadConfig};
use crate::special::{beta_reg, hyp2f1, inv_beta_reg, ln_beta};
use crate::{Error, Result};

/// Order-2 Wasserstein distance between the beta laws `B(alpha, beta)` and
/// `B(beta, alpha)` on `[0, 1]`.
///
/// The cross term is obtained by parts; the remaining integral is evaluated
/// after the change of variable `x = I_t^{-1}(alpha, beta)`, which cancels
/// the singular factor `x^{1-alpha} (1-x)^{1-beta}`.
pub fn beta_beta_w2(alpha: f64, beta: f64) -> Result<f64> {
    check(alpha, beta)?;
    if alpha == beta {
        return Ok(0.0);
    }
    let s = alpha + beta;
    let second = (alpha * (alpha + 1.0) + beta * (beta + 1.0)) / (s * (s + 1.0));
    let j = cross_integral(alpha, beta)?;
    Ok((second - 2.0 * (beta / s - j)).max(0.0).sqrt())
}

/// `J = 1/((beta+1) B(alpha, beta)) int_0^1 g^{beta+1} 2F1(beta+1, 1-alpha; beta+2; g) dx`
/// with `g = I^{-1}_{I_x(alpha, beta)}(beta, alpha)`.
pub fn cross_integral(alpha: f64, beta: f64) -> Result<f64> {
    check(alpha, beta)?;
    let err = RefCell::new(None);
    let cfg = QuadConfig::default();
    let f = |x: f64| -> f64 {
        let t = beta_reg(alpha, beta, x);
        let g = inv_beta_reg(beta, alpha, t);
        if g <= 0.0 {
            return 0.0;
        }
        match hyp2f1(beta + 1.0, 1.0 - alpha, beta + 2.0, g.min(1.0)) {
            Ok(h) => g.powf(beta + 1.0) * h,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let v = integrate(f, 0.0, 0.5, &cfg)? + integrate(f, 0.5, 1.0, &cfg)?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(v / ((beta + 1.0) * ln_beta(alpha, beta).exp()))
}

/// `int_0^1 (I_t^{-1}(alpha, beta))^2 dt` by direct quadrature.
pub fn inverse_beta_second_moment(alpha: f64, beta: f64) -> Result<f64> {
    check(alpha, beta)?;
    let cfg = QuadConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_depth: 60,
    };
    let f = |t: f64| inv_beta_reg(alpha, beta, t).powi(2);
    Ok(integrate(f, 0.0, 0.5, &cfg)? + integrate(f, 0.5, 1.0, &cfg)?)
}

fn check(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::invalid("beta parameters must be positive"));
    }
    Ok(())
}
