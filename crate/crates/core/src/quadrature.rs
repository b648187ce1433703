//! Gauss–Legendre rules and an adaptive integrator.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 1 { x } else { p1 };
                let pm1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            if n == 1 {
                dp = 1.0;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn gl10() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(10))
}

fn gl20() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(20))
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_depth: 60,
        }
    }
}

/// Adaptive Gauss–Legendre integration of `f` over `[a, b]`.
///
/// Each panel is integrated with 10 and 20 nodes; panels whose two
/// estimates disagree are bisected.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let coarse0 = gl10().integrate(&mut f, a, b);
    let fine0 = gl20().integrate(&mut f, a, b);
    let scale = fine0.abs();
    let mut stack = vec![(a, b, fine0, coarse0, 0u32)];
    let mut total = 0.0;
    let mut comp = 0.0;
    let width = (b - a).abs();
    while let Some((lo, hi, fine, coarse, depth)) = stack.pop() {
        let frac = (hi - lo).abs() / width;
        let tol = (cfg.abs_tol + cfg.rel_tol * scale) * frac.sqrt().max(frac);
        if !fine.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{lo}, {hi}]")));
        }
        if (fine - coarse).abs() <= tol || depth >= cfg.max_depth {
            if depth >= cfg.max_depth && (fine - coarse).abs() > 1e-8 * (1.0 + scale) {
                return Err(Error::Quadrature(format!(
                    "panel [{lo}, {hi}] unresolved at depth {depth}"
                )));
            }
            let y = fine - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        for (l, h) in [(lo, mid), (mid, hi)] {
            let c = gl10().integrate(&mut f, l, h);
            let fi = gl20().integrate(&mut f, l, h);
            stack.push((l, h, fi, c, depth + 1));
        }
    }
    Ok(total)
}

/// Adaptive integration over consecutive panels split at `breaks`
/// (sorted, including both end points).
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<f64> {
    let mut s = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            s += integrate(&mut f, w[0], w[1], cfg)?;
        }
    }
    Ok(s)
}
