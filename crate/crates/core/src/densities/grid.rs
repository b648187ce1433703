use super::Cdf1D;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Density sampled at the `M` cell midpoints of `[a, b]`.
///
/// Values are interpolated through the weighted function
/// `g(x) = xi(x) * sqrt((x - a)(b - x))` with local cubics, and integrals are
/// taken in the angle variable `x = c - r cos(phi)`. Both choices keep
/// arcsine-type densities, which blow up at the end points, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid1D {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl DensityGrid1D {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if !(b > a) {
            return Err(Error::invalid("grid needs b > a"));
        }
        if values.len() < 4 {
            return Err(Error::invalid("grid needs at least 4 nodes"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid density has non-finite values"));
        }
        Ok(DensityGrid1D { a, b, values })
    }

    /// Sample `f` at `m` midpoints.
    pub fn from_fn<F: FnMut(f64) -> f64>(a: f64, b: f64, m: usize, mut f: F) -> Result<Self> {
        let h = (b - a) / m as f64;
        let values = (0..m).map(|k| f(a + (k as f64 + 0.5) * h)).collect();
        Self::new(a, b, values)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.values.len() as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.a + (k as f64 + 0.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn weight(&self, x: f64) -> f64 {
        ((x - self.a) * (self.b - x)).max(0.0).sqrt()
    }

    /// Interpolated weighted density `g(x)`.
    pub fn weighted_at(&self, x: f64) -> f64 {
        let m = self.len();
        let h = self.h();
        let t = (x - self.a) / h - 0.5;
        let k = t.floor() as isize;
        let s = (k - 1).clamp(0, m as isize - 4) as usize;
        let mut v = 0.0;
        for i in 0..4 {
            let xi = (s + i) as f64;
            let mut l = 1.0;
            for j in 0..4 {
                if j != i {
                    let xj = (s + j) as f64;
                    l *= (t - xj) / (xi - xj);
                }
            }
            let node = s + i;
            v += l * self.values[node] * self.weight(self.node(node));
        }
        v
    }

    /// Interpolated density at `x` (zero outside the open interval).
    pub fn eval(&self, x: f64) -> f64 {
        if !(x > self.a && x < self.b) {
            return 0.0;
        }
        (self.weighted_at(x) / self.weight(x)).max(0.0)
    }

    /// Total mass.
    pub fn integral(&self) -> f64 {
        let k = 4 * self.len();
        let c = 0.5 * (self.a + self.b);
        let r = 0.5 * (self.b - self.a);
        let dphi = std::f64::consts::PI / k as f64;
        let mut s = 0.0;
        for j in 0..k {
            let phi = (j as f64 + 0.5) * dphi;
            s += self.weighted_at(c - r * phi.cos()).max(0.0);
        }
        s * dphi
    }

    /// Rescale to unit mass.
    pub fn normalized(&self) -> Result<Self> {
        let s = self.integral();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::invalid(format!("cannot normalize grid density with mass {s}")));
        }
        Ok(DensityGrid1D {
            a: self.a,
            b: self.b,
            values: self.values.iter().map(|v| v / s).collect(),
        })
    }

    /// Largest absolute difference to `f` over nodes at least `margin` away
    /// from the end points.
    pub fn sup_diff<F: Fn(f64) -> f64>(&self, f: F, margin: f64) -> f64 {
        (0..self.len())
            .map(|k| self.node(k))
            .filter(|x| *x - self.a >= margin && self.b - *x >= margin)
            .map(|x| (self.eval(x) - f(x)).abs())
            .fold(0.0, f64::max)
    }

    /// CDF of the (normalized) interpolated density.
    pub fn cdf(&self) -> GridCdf {
        let k = 16 * self.len();
        let c = 0.5 * (self.a + self.b);
        let r = 0.5 * (self.b - self.a);
        let dphi = std::f64::consts::PI / k as f64;
        let gl = GaussLegendre::new(4);
        let mut table = Vec::with_capacity(k + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for j in 0..k {
            let lo = j as f64 * dphi;
            acc += gl.integrate(|p| self.weighted_at(c - r * p.cos()).max(0.0), lo, lo + dphi);
            table.push(acc);
        }
        let total = acc;
        table.iter_mut().for_each(|v| *v /= total);
        GridCdf {
            a: self.a,
            b: self.b,
            table,
        }
    }
}

/// Tabulated CDF of a [`DensityGrid1D`], stored on a uniform angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCdf {
    a: f64,
    b: f64,
    table: Vec<f64>,
}

impl GridCdf {
    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn dphi(&self) -> f64 {
        std::f64::consts::PI / (self.table.len() - 1) as f64
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= self.a {
            return 0.0;
        }
        if y >= self.b {
            return 1.0;
        }
        let c = 0.5 * (self.a + self.b);
        let r = 0.5 * (self.b - self.a);
        let phi = ((c - y) / r).clamp(-1.0, 1.0).acos();
        let t = phi / self.dphi();
        let j = (t.floor() as usize).min(self.table.len() - 2);
        let f = t - j as f64;
        self.table[j] * (1.0 - f) + self.table[j + 1] * f
    }

    pub fn quantile(&self, s: f64) -> f64 {
        let n = self.table.len();
        let j = self.table.partition_point(|v| *v < s).clamp(1, n - 1);
        let (f0, f1) = (self.table[j - 1], self.table[j]);
        let frac = if f1 > f0 { ((s - f0) / (f1 - f0)).clamp(0.0, 1.0) } else { 0.0 };
        let phi = (j as f64 - 1.0 + frac) * self.dphi();
        let c = 0.5 * (self.a + self.b);
        let r = 0.5 * (self.b - self.a);
        c - r * phi.cos()
    }

    pub fn into_cdf(self) -> Cdf1D {
        Cdf1D::Grid(self)
    }
}
