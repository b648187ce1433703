use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    fn min_abs(&self) -> Result<f64> {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            return Err(Error::invalid(format!(
                "interval [{}, {}] contains 0; the monotonicity argument needs it bounded away from zero",
                self.lo, self.hi
            )));
        }
        Ok(self.lo.abs().min(self.hi.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Invalidated,
    NotInvalidated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrajnaResult {
    pub verdict: Verdict,
    pub witness: f64,
}

/// Reachability check for `x' = -p x^3` between interval data at `0` and `T`.
///
/// A state `x_T` is reachable in time `T` only if `1 > 2 x_T^2 p T`. The
/// witness is that expression at its smallest corner; the model is
/// invalidated when even the smallest value is at least one.
pub fn prajna_check(x0: Interval, xt: Interval, p: Interval, t: f64) -> Result<PrajnaResult> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("final time must be nonnegative"));
    }
    x0.min_abs()?;
    let xm = xt.min_abs()?;
    if !(p.lo > 0.0) {
        return Err(Error::invalid("parameter interval must lie in (0, inf)"));
    }
    let witness = 2.0 * xm * xm * p.lo * t;
    let verdict = if witness >= 1.0 {
        Verdict::Invalidated
    } else {
        Verdict::NotInvalidated
    };
    Ok(PrajnaResult { verdict, witness })
}

/// Initial joint density `xi_0(x0, p)` that transports to `xi_T` under
/// `x' = -p x^3` in time `T`.
pub fn cubic_density_transport<F>(xi_t: F, t: f64) -> impl Fn(f64, f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    move |x0: f64, p: f64| {
        let s = 1.0 + 2.0 * x0 * x0 * p * t;
        s.powf(-1.5) * xi_t(x0 / s.sqrt(), p)
    }
}
