//! Special functions.
//!
//! `erf`, `erf_inv`, log-gamma, digamma and the regularised incomplete beta
//! come from `statrs`; the inverse incomplete beta and the Gauss
//! hypergeometric series are implemented here.

use crate::{Error, Result};

pub use statrs::function::beta::{beta_reg, ln_beta};
pub use statrs::function::erf::{erf, erf_inv, erfc};
pub use statrs::function::gamma::{digamma, gamma, ln_gamma};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal quantile.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = SQRT_2 * erf_inv(2.0 * p - 1.0);
    // one Halley refinement step
    let d = norm_pdf(x);
    if d > 0.0 && x.is_finite() {
        let r = if p < 0.5 {
            (norm_cdf(x) - p) / d
        } else {
            ((1.0 - p) - 0.5 * erfc(x / SQRT_2)) / d
        };
        x -= r / (1.0 + 0.5 * x * r);
    }
    x
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Beta(a, b) density on [0, 1].
pub fn beta_pdf(a: f64, b: f64, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    if x == 0.0 || x == 1.0 {
        let e = if x == 0.0 { a } else { b };
        return if e < 1.0 {
            f64::INFINITY
        } else if e == 1.0 {
            (-ln_beta(a, b)).exp()
        } else {
            0.0
        };
    }
    ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_beta(a, b)).exp()
}

/// Inverse of the regularised incomplete beta function in its argument:
/// returns `x` with `I_x(a, b) = p`.
///
/// Bisection keeps a bracket; Newton steps are taken whenever they stay
/// inside it. Converges to `1e-12` absolute or better.
pub fn inv_beta_reg(a: f64, b: f64, p: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let lnb = ln_beta(a, b);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = 0.5;
    for _ in 0..300 {
        let f = beta_reg(a, b, x) - p;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            break;
        }
        let dens = ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - lnb).exp();
        let newton = x - f / dens;
        x = if dens.is_finite() && dens > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (x - lo).min(hi - x) <= 1e-16 * x && hi - lo < 1e-12 {
            break;
        }
    }
    x
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for `0 <= z <= 1`.
///
/// At `z = 1` Gauss's theorem is used (requires `c - a - b > 0`). Otherwise a
/// power series with relative tolerance `1e-12` and at most `1e5` terms.
/// When `c = a + 1` and `z` is close to one, the incomplete-beta identity
/// `z^a 2F1(a, b; a+1; z) / a = B(z; a, 1-b)` is used instead.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z == 1.0 {
        if c - a - b > 0.0 {
            return Ok(gamma(c) * gamma(c - a - b) / (gamma(c - a) * gamma(c - b)));
        }
        return Err(Error::NonConvergence(format!(
            "hyp2f1({a}, {b}; {c}; 1) diverges"
        )));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::invalid(format!("hyp2f1 requires 0 <= z <= 1, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z > 0.9 && (c - a - 1.0).abs() < 1e-14 && b < 1.0 && a > 0.0 {
        let q = 1.0 - b;
        let inc = beta_reg(a, q, z) * ln_beta(a, q).exp();
        return Ok(a * z.powf(-a) * inc);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..100_000u32 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-15 * sum.abs() {
            return Ok(sum);
        }
        if term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!(
        "hyp2f1({a}, {b}; {c}; {z}) series did not converge in 1e5 terms"
    )))
}
