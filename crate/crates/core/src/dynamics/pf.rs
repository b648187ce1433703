use std::f64::consts::PI;

use super::MapModel;
use crate::densities::DensityGrid1D;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

const ULAM_SUBSAMPLES: usize = 32;
const KERNEL_NODES: usize = 200;
const KERNEL_TOL: f64 = 1e-6;

/// One Perron-Frobenius step on a grid density; the result has unit mass.
pub fn pf_step(map: &MapModel, density: &DensityGrid1D) -> Result<DensityGrid1D> {
    let (a, b) = density.bounds();
    let m = density.len();
    let values = match map {
        MapModel::Deterministic {
            map,
            preimages,
            domain,
        } => {
            let tol = 1e-12 * (domain.1 - domain.0).abs().max(1.0);
            if a < domain.0 - tol || b > domain.1 + tol {
                return Err(Error::invalid(format!(
                    "grid [{a}, {b}] is not inside the map domain [{}, {}]",
                    domain.0, domain.1
                )));
            }
            match preimages {
                Some(pre) => {
                    let mut v = Vec::with_capacity(m);
                    for k in 0..m {
                        let x = density.node(k);
                        let mut s = 0.0;
                        for (y, jac) in pre(x) {
                            if y < domain.0 - tol || y > domain.1 + tol || !y.is_finite() {
                                return Err(Error::invalid(format!(
                                    "preimage {y} of {x} is outside the map domain"
                                )));
                            }
                            if jac == 0.0 {
                                return Err(Error::Singular(format!("zero map derivative at {y}")));
                            }
                            s += density.eval(y) / jac.abs();
                        }
                        v.push(s);
                    }
                    v
                }
                None => ulam(map.as_ref(), density)?,
            }
        }
        MapModel::MultiplicativeNoise { s, phi } => kernel_step(density, |x, y| {
            let sy = s(y);
            if sy > 0.0 {
                phi(x / sy) / sy
            } else {
                0.0
            }
        })?,
        MapModel::AdditiveNoise { s, phi } => kernel_step(density, |x, y| phi(x - s(y)))?,
    };
    DensityGrid1D::new(a, b, values)?.normalized()
}

fn ulam(map: &dyn Fn(f64) -> f64, density: &DensityGrid1D) -> Result<Vec<f64>> {
    let (a, b) = density.bounds();
    let m = density.len();
    let h = density.h();
    let mut out = vec![0.0; m];
    let frac = 1.0 / ULAM_SUBSAMPLES as f64;
    for c in 0..m {
        let mass = density.values()[c] * h;
        if mass == 0.0 {
            continue;
        }
        for s in 0..ULAM_SUBSAMPLES {
            let x = a + (c as f64 + (s as f64 + 0.5) * frac) * h;
            let y = map(x);
            if !(y >= a - 1e-12 && y <= b + 1e-12) {
                return Err(Error::invalid(format!("image {y} of {x} leaves the grid")));
            }
            let d = (((y - a) / h).floor().max(0.0) as usize).min(m - 1);
            out[d] += mass * frac;
        }
    }
    Ok(out.into_iter().map(|v| v / h).collect())
}

/// `x_k -> int g(y(phi)) K(x_k, y(phi)) dphi` with `y = c - r cos(phi)`.
fn kernel_step<K: Fn(f64, f64) -> f64>(density: &DensityGrid1D, kernel: K) -> Result<Vec<f64>> {
    let (a, b) = density.bounds();
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let coarse = GaussLegendre::new(KERNEL_NODES);
    let fine = GaussLegendre::new(2 * KERNEL_NODES);
    let prep = |gl: &GaussLegendre| -> Vec<(f64, f64)> {
        gl.nodes
            .iter()
            .zip(&gl.weights)
            .map(|(t, w)| {
                let phi = 0.5 * PI * (t + 1.0);
                let y = c - r * phi.cos();
                (y, 0.5 * PI * w * density.weighted_at(y).max(0.0))
            })
            .collect()
    };
    let pc = prep(&coarse);
    let pf = prep(&fine);
    let mut out = Vec::with_capacity(density.len());
    for k in 0..density.len() {
        let x = density.node(k);
        let i1: f64 = pc.iter().map(|(y, w)| w * kernel(x, *y)).sum();
        let i2: f64 = pf.iter().map(|(y, w)| w * kernel(x, *y)).sum();
        if !i2.is_finite() || (i1 - i2).abs() > KERNEL_TOL * i2.abs().max(1.0) {
            return Err(Error::Quadrature(format!(
                "kernel integral at x = {x}: {i1} with {KERNEL_NODES} nodes vs {i2} with {}",
                2 * KERNEL_NODES
            )));
        }
        out.push(i2.max(0.0));
    }
    Ok(out)
}
