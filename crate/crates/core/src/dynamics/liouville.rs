use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OdeModel;
use crate::densities::{DensityFamily, ParticleEnsemble, Scheme};
use crate::{Error, Result};

/// Fixed-step RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub seed: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 0.01,
            scheme: Scheme::Halton,
            seed: 0,
        }
    }
}

/// Particles plus the density value carried along each characteristic.
#[derive(Debug, Clone)]
pub struct WeightedDensityEnsemble {
    pub t: f64,
    pub ensemble: ParticleEnsemble,
    pub density: Vec<f64>,
}

/// Sample `initial` and propagate along characteristics.
pub fn propagate_liouville(
    model: &OdeModel,
    initial: &DensityFamily,
    n: usize,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<WeightedDensityEnsemble>> {
    if initial.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: initial.dim(),
        });
    }
    let ens = initial.sample(n, cfg.seed, cfg.scheme)?;
    let density = (0..ens.len())
        .map(|i| initial.pdf(ens.point(i)))
        .collect::<Result<Vec<_>>>()?;
    propagate_liouville_from(model, &ens, &density, t_grid, cfg.dt)
}

/// Propagate a given ensemble with initial density values. Reported times
/// are `t_grid`, measured from the initial time 0.
pub fn propagate_liouville_from(
    model: &OdeModel,
    initial: &ParticleEnsemble,
    density0: &[f64],
    t_grid: &[f64],
    dt: f64,
) -> Result<Vec<WeightedDensityEnsemble>> {
    let d = model.dim();
    if initial.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: initial.dim(),
        });
    }
    if density0.len() != initial.len() {
        return Err(Error::DimensionMismatch {
            expected: initial.len(),
            got: density0.len(),
        });
    }
    check_grid(t_grid, dt)?;
    let tau = t_grid.len();
    let paths: Vec<Vec<f64>> = (0..initial.len())
        .into_par_iter()
        .map(|i| trace(model, initial.point(i), density0[i], t_grid, dt).map_err(|(t, reason)| {
            Error::Propagation {
                particle: i,
                time: t,
                reason,
            }
        }))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(tau);
    for (k, &t) in t_grid.iter().enumerate() {
        let mut pts = Vec::with_capacity(initial.len() * d);
        let mut dens = Vec::with_capacity(initial.len());
        for p in &paths {
            let row = &p[k * (d + 1)..(k + 1) * (d + 1)];
            pts.extend_from_slice(&row[..d]);
            dens.push(row[d]);
        }
        let ensemble = ParticleEnsemble::from_flat(d, pts, Some(initial.weights().to_vec()))?;
        out.push(WeightedDensityEnsemble {
            t,
            ensemble,
            density: dens,
        });
    }
    Ok(out)
}

pub(crate) fn check_grid(t_grid: &[f64], dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("integration step must be positive"));
    }
    if t_grid.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if t_grid[0] < 0.0 || t_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::invalid("time grid must be nonnegative and nondecreasing"));
    }
    Ok(())
}

/// Number of equal steps covering `span` with step at most `dt`.
pub(crate) fn steps_for(span: f64, dt: f64) -> usize {
    if span <= 0.0 {
        return 0;
    }
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Integrates one characteristic; returns `[x, xi]` rows for each report time.
fn trace(
    model: &OdeModel,
    x0: &[f64],
    xi0: f64,
    t_grid: &[f64],
    dt: f64,
) -> std::result::Result<Vec<f64>, (f64, String)> {
    let d = x0.len();
    if !(xi0 >= 0.0) || !xi0.is_finite() {
        return Err((0.0, format!("initial density value {xi0}")));
    }
    let mut x = x0.to_vec();
    let mut logxi = xi0.ln();
    let mut t = 0.0;
    let mut rows = Vec::with_capacity(t_grid.len() * (d + 1));
    let mut ws = Rk4::new(d);
    for &tk in t_grid {
        let steps = steps_for(tk - t, dt);
        let h = if steps > 0 { (tk - t) / steps as f64 } else { 0.0 };
        for s in 0..steps {
            logxi += ws.step(model, &mut x, h);
            let ts = t + (s + 1) as f64 * h;
            if x.iter().any(|v| !v.is_finite()) {
                return Err((ts, "non-finite state".into()));
            }
            if logxi.is_nan() || logxi == f64::INFINITY {
                return Err((ts, "non-finite density".into()));
            }
        }
        t = tk;
        rows.extend_from_slice(&x);
        rows.push(logxi.exp());
    }
    Ok(rows)
}

pub(crate) struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(d: usize) -> Self {
        Rk4 {
            k: [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]],
            tmp: vec![0.0; d],
        }
    }

    /// Advance `x` by `h`; returns the increment of `log xi`, i.e. minus the
    /// RK4 quadrature of the divergence along the step.
    pub(crate) fn step(&mut self, model: &OdeModel, x: &mut [f64], h: f64) -> f64 {
        let d = x.len();
        let mut div = [0.0; 4];
        let coef = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            if s == 0 {
                self.tmp.copy_from_slice(x);
            } else {
                for j in 0..d {
                    self.tmp[j] = x[j] + coef[s] * h * self.k[s - 1][j];
                }
            }
            model.drift(&self.tmp, &mut self.k[s]);
            div[s] = model.divergence(&self.tmp);
        }
        for j in 0..d {
            x[j] += h / 6.0 * (self.k[0][j] + 2.0 * self.k[1][j] + 2.0 * self.k[2][j] + self.k[3][j]);
        }
        -h / 6.0 * (div[0] + 2.0 * div[1] + 2.0 * div[2] + div[3])
    }
}

/// Flow map of the ODE over `[0, t]` for a single point.
pub fn flow(model: &OdeModel, x0: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    let steps = steps_for(t, dt);
    let h = if steps > 0 { t / steps as f64 } else { 0.0 };
    let mut ws = Rk4::new(x.len());
    for _ in 0..steps {
        ws.step_state(model, &mut x, h);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Propagation {
            particle: 0,
            time: t,
            reason: "non-finite state".into(),
        });
    }
    Ok(x)
}

impl Rk4 {
    /// State-only RK4 step.
    pub(crate) fn step_state(&mut self, model: &OdeModel, x: &mut [f64], h: f64) {
        let d = x.len();
        let coef = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            if s == 0 {
                self.tmp.copy_from_slice(x);
            } else {
                for j in 0..d {
                    self.tmp[j] = x[j] + coef[s] * h * self.k[s - 1][j];
                }
            }
            model.drift(&self.tmp, &mut self.k[s]);
        }
        for j in 0..d {
            x[j] += h / 6.0 * (self.k[0][j] + 2.0 * self.k[1][j] + 2.0 * self.k[2][j] + self.k[3][j]);
        }
    }
}
