use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::liouville::{steps_for, Rk4};
use super::OdeModel;
use crate::densities::{DensityFamily, Scheme};
use crate::linalg::{is_hurwitz, lyapunov, symmetrize, to_rows};
use crate::{Error, Result};

/// Stationary law `N(0, S)` of `dx = A x dt + B dW`, `A S + S A^T + B Q B^T = 0`.
///
/// Controllability of `(A, B)` is the caller's responsibility; without it the
/// covariance may be singular.
pub fn stationary_linear_sde(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> Result<DensityFamily> {
    let sigma = stationary_covariance(a, b, q)?;
    DensityFamily::gaussian(vec![0.0; a.nrows()], to_rows(&sigma))
}

pub(crate) fn stationary_covariance(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.nrows(),
        });
    }
    if q.nrows() != b.ncols() || q.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: b.ncols(),
            got: q.nrows(),
        });
    }
    if !is_hurwitz(a) {
        return Err(Error::NotHurwitz("drift matrix has eigenvalues with Re >= 0".into()));
    }
    let bqb = b * q * b.transpose();
    Ok(symmetrize(&lyapunov(a, &bqb)?))
}

/// Rectangular grid specification: `n` equally spaced nodes including ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Axis { lo, hi, n }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step()
    }

    fn validate(&self) -> Result<()> {
        if !(self.hi > self.lo) || self.n < 3 {
            return Err(Error::invalid("grid axis needs hi > lo and at least 3 nodes"));
        }
        Ok(())
    }
}

/// Density tabulated on a 2-D tensor grid, row-major in `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid2D {
    pub x1: Axis,
    pub x2: Axis,
    pub values: Vec<f64>,
}

impl DensityGrid2D {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.x2.n + j]
    }

    /// Trapezoidal integral.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.x1, self.x2)
    }

    /// Grid indices of strict local maxima (8-neighbourhood, interior only).
    pub fn local_maxima(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..self.x1.n - 1 {
            for j in 1..self.x2.n - 1 {
                let v = self.at(i, j);
                let mut is_max = true;
                for di in [-1isize, 0, 1] {
                    for dj in [-1isize, 0, 1] {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let u = self.at((i as isize + di) as usize, (j as isize + dj) as usize);
                        if u >= v {
                            is_max = false;
                        }
                    }
                }
                if is_max {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn trapezoid(values: &[f64], x1: Axis, x2: Axis) -> f64 {
    let mut s = 0.0;
    for i in 0..x1.n {
        let wi = if i == 0 || i == x1.n - 1 { 0.5 } else { 1.0 };
        for j in 0..x2.n {
            let wj = if j == 0 || j == x2.n - 1 { 0.5 } else { 1.0 };
            s += wi * wj * values[i * x2.n + j];
        }
    }
    s * x1.step() * x2.step()
}

/// Stationary density `exp(-(c/Q) (U(x1) + x2^2 / 2))` of the damped
/// Hamiltonian SDE, normalized on the grid.
///
/// The normalization is rejected as divergent when the density on the grid
/// boundary exceeds `1e-3` of its maximum, i.e. the grid does not contain the
/// bulk of the mass.
pub fn stationary_hamiltonian<U: Fn(f64) -> f64>(
    u: U,
    c: f64,
    q: f64,
    x1: Axis,
    x2: Axis,
) -> Result<DensityGrid2D> {
    if !(c > 0.0) || !(q > 0.0) {
        return Err(Error::invalid("damping and noise strength must be positive"));
    }
    x1.validate()?;
    x2.validate()?;
    let k = c / q;
    let mut e = Vec::with_capacity(x1.n * x2.n);
    for i in 0..x1.n {
        let ui = u(x1.node(i));
        for j in 0..x2.n {
            let y = x2.node(j);
            e.push(k * (ui + 0.5 * y * y));
        }
    }
    if e.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("potential is not finite on the grid"));
    }
    let emin = e.iter().cloned().fold(f64::INFINITY, f64::min);
    if !emin.is_finite() {
        return Err(Error::invalid("divergent normalization: potential unbounded below"));
    }
    let raw: Vec<f64> = e.iter().map(|v| (-(v - emin)).exp()).collect();
    let boundary = (0..x1.n)
        .flat_map(|i| [(i, 0), (i, x2.n - 1)])
        .chain((0..x2.n).flat_map(|j| [(0, j), (x1.n - 1, j)]))
        .map(|(i, j)| raw[i * x2.n + j])
        .fold(0.0, f64::max);
    if boundary > 1e-3 {
        return Err(Error::invalid(format!(
            "divergent normalization: boundary density is {boundary:e} of the peak"
        )));
    }
    let z = trapezoid(&raw, x1, x2);
    Ok(DensityGrid2D {
        x1,
        x2,
        values: raw.into_iter().map(|v| v / z).collect(),
    })
}

/// Settings for region-of-attraction classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoaConfig {
    pub horizon: f64,
    pub radius: f64,
    pub dt: f64,
}

impl Default for RoaConfig {
    fn default() -> Self {
        RoaConfig {
            horizon: 100.0,
            radius: 1e-3,
            dt: 0.01,
        }
    }
}

/// Dirac-mixture stationary law together with classification counts.
#[derive(Debug, Clone)]
pub struct DiracStationary {
    /// Mixture over the attractors with masses renormalized over the
    /// classified samples.
    pub family: DensityFamily,
    /// Raw mass fraction per attractor (sums with `unconverged_mass` to 1).
    pub masses: Vec<f64>,
    pub unconverged: usize,
    pub unconverged_mass: f64,
}

/// Attractor index of `x0` by long-horizon integration; `None` when the
/// trajectory is not within `radius` of any attractor at the horizon.
///
/// Integration stops early once the state is within `radius / 10` of an
/// attractor.
pub fn classify_by_integration(
    model: &OdeModel,
    attractors: &[Vec<f64>],
    x0: &[f64],
    cfg: &RoaConfig,
) -> Option<usize> {
    let mut x = x0.to_vec();
    let steps = steps_for(cfg.horizon, cfg.dt);
    let h = cfg.horizon / steps as f64;
    let mut ws = Rk4::new(x.len());
    let near = |x: &[f64], r: f64| -> Option<usize> {
        attractors.iter().position(|p| {
            p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= r
        })
    };
    for s in 0..steps {
        ws.step_state(model, &mut x, h);
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        if s % 16 == 0 {
            if let Some(i) = near(&x, 0.1 * cfg.radius) {
                return Some(i);
            }
        }
    }
    near(&x, cfg.radius)
}

/// Monte Carlo estimate of the stationary masses `m_i*`.
pub fn dirac_stationary(
    model: &OdeModel,
    xi0: &DensityFamily,
    attractors: &[Vec<f64>],
    classifier: Option<&(dyn Fn(&[f64]) -> Option<usize> + Sync)>,
    n: usize,
    seed: u64,
    scheme: Scheme,
    cfg: &RoaConfig,
) -> Result<DiracStationary> {
    if attractors.is_empty() {
        return Err(Error::invalid("no attractors given"));
    }
    if let Some(p) = attractors.iter().find(|p| p.len() != model.dim()) {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: p.len(),
        });
    }
    let ens = xi0.sample(n, seed, scheme)?;
    let labels: Vec<Option<usize>> = (0..ens.len())
        .into_par_iter()
        .map(|i| {
            let x = ens.point(i);
            match classifier {
                Some(c) => c(x),
                None => classify_by_integration(model, attractors, x, cfg),
            }
        })
        .collect();
    let mut masses = vec![0.0; attractors.len()];
    let mut unconverged = 0;
    let mut unconverged_mass = 0.0;
    for (l, w) in labels.iter().zip(ens.weights()) {
        match l {
            Some(i) if *i < attractors.len() => masses[*i] += w,
            _ => {
                unconverged += 1;
                unconverged_mass += w;
            }
        }
    }
    if unconverged > 0 {
        log::warn!("{unconverged} of {n} trajectories did not converge to an attractor");
    }
    let classified: f64 = masses.iter().sum();
    if !(classified > 0.0) {
        return Err(Error::NonConvergence("no trajectory reached an attractor".into()));
    }
    let family = DensityFamily::dirac_mixture(
        attractors.to_vec(),
        masses.iter().map(|m| m / classified).collect(),
    )?;
    Ok(DiracStationary {
        family,
        masses,
        unconverged,
        unconverged_mass,
    })
}

/// Horizon for [`linear_gaussian_moments`].
#[derive(Debug, Clone, PartialEq)]
pub enum LinearHorizon {
    /// Report at the given times, integrating the moment ODEs with RK4.
    Continuous { times: Vec<f64>, dt: f64 },
    /// Report after `0..=steps` iterations of the recursion.
    Discrete { steps: usize },
}

/// Output mean and covariance of a linear Gaussian system over time.
#[allow(clippy::too_many_arguments)]
pub fn linear_gaussian_moments(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    q: &DMatrix<f64>,
    mu0: &DVector<f64>,
    s0: &DMatrix<f64>,
    horizon: &LinearHorizon,
) -> Result<Vec<(DVector<f64>, DMatrix<f64>)>> {
    let n = a.nrows();
    let dims = [
        (a.ncols(), n),
        (b.nrows(), n),
        (c.ncols(), n),
        (q.nrows(), b.ncols()),
        (q.ncols(), b.ncols()),
        (mu0.len(), n),
        (s0.nrows(), n),
        (s0.ncols(), n),
    ];
    if let Some((got, expected)) = dims.iter().find(|(g, e)| g != e) {
        return Err(Error::DimensionMismatch {
            expected: *expected,
            got: *got,
        });
    }
    let bqb = b * q * b.transpose();
    let out = |m: &DVector<f64>, s: &DMatrix<f64>| (c * m, symmetrize(&(c * s * c.transpose())));
    let mut res = Vec::new();
    match horizon {
        LinearHorizon::Discrete { steps } => {
            let mut m = mu0.clone();
            let mut s = s0.clone();
            res.push(out(&m, &s));
            for _ in 0..*steps {
                m = a * m;
                s = a * &s * a.transpose() + &bqb;
                res.push(out(&m, &s));
            }
        }
        LinearHorizon::Continuous { times, dt } => {
            super::liouville::check_grid(times, *dt)?;
            let mut m = mu0.clone();
            let mut s = s0.clone();
            let mut t = 0.0;
            let fs = |s: &DMatrix<f64>| a * s + s * a.transpose() + &bqb;
            for &tk in times {
                let steps = steps_for(tk - t, *dt);
                let h = if steps > 0 { (tk - t) / steps as f64 } else { 0.0 };
                for _ in 0..steps {
                    let k1 = a * &m;
                    let k2 = a * (&m + &k1 * (0.5 * h));
                    let k3 = a * (&m + &k2 * (0.5 * h));
                    let k4 = a * (&m + &k3 * h);
                    m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                    let l1 = fs(&s);
                    let l2 = fs(&(&s + &l1 * (0.5 * h)));
                    let l3 = fs(&(&s + &l2 * (0.5 * h)));
                    let l4 = fs(&(&s + &l3 * h));
                    s += (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (h / 6.0);
                }
                t = tk;
                res.push(out(&m, &s));
            }
        }
    }
    Ok(res)
}
