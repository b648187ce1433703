use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Vector field `x -> dx`, writing into the output slice.
pub type VectorField = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// Scalar function of a state.
pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Scalar function of a scalar.
pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// All `(preimage, |T'(preimage)|)` pairs of a 1-D point.
pub type PreimageFn = Arc<dyn Fn(f64) -> Vec<(f64, f64)> + Send + Sync>;
/// Inverse branch of an output map; `None` when `y` is outside its image.
pub type BranchFn = Arc<dyn Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync>;

/// One inverse branch `x_j*(y)` of an output map together with the
/// Jacobian determinant of the forward map evaluated at the preimage.
#[derive(Clone)]
pub struct InverseBranch {
    pub preimage: BranchFn,
    pub jacobian_det: ScalarField,
}

/// Output map `y = h(x)`.
#[derive(Clone)]
pub struct OutputMap {
    in_dim: usize,
    out_dim: usize,
    map: Option<VectorField>,
    jacobian_det: Option<ScalarField>,
    branches: Vec<InverseBranch>,
}

impl fmt::Debug for OutputMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OutputMap")
            .field("in_dim", &self.in_dim)
            .field("out_dim", &self.out_dim)
            .field("identity", &self.map.is_none())
            .field("branches", &self.branches.len())
            .finish()
    }
}

impl OutputMap {
    pub fn identity(dim: usize) -> Self {
        OutputMap {
            in_dim: dim,
            out_dim: dim,
            map: None,
            jacobian_det: None,
            branches: Vec::new(),
        }
    }

    pub fn new(in_dim: usize, out_dim: usize, map: VectorField) -> Self {
        OutputMap {
            in_dim,
            out_dim,
            map: Some(map),
            jacobian_det: None,
            branches: Vec::new(),
        }
    }

    /// Keep the first `k` coordinates (states without the parameter block).
    pub fn projection(in_dim: usize, k: usize) -> Self {
        Self::new(
            in_dim,
            k,
            Arc::new(move |x: &[f64], y: &mut [f64]| y.copy_from_slice(&x[..k])),
        )
    }

    /// Scalar linear output `y = c x`.
    pub fn scale(c: f64) -> Self {
        let mut h = Self::new(1, 1, Arc::new(move |x: &[f64], y: &mut [f64]| y[0] = c * x[0]));
        h.jacobian_det = Some(Arc::new(move |_| c));
        h.branches.push(InverseBranch {
            preimage: Arc::new(move |y: &[f64]| Some(vec![y[0] / c])),
            jacobian_det: Arc::new(move |_| c),
        });
        h
    }

    pub fn with_jacobian_det(mut self, det: ScalarField) -> Self {
        self.jacobian_det = Some(det);
        self
    }

    pub fn with_branch(mut self, branch: InverseBranch) -> Self {
        self.branches.push(branch);
        self
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_none()
    }

    pub fn branches(&self) -> &[InverseBranch] {
        &self.branches
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        match &self.map {
            None => y.copy_from_slice(x),
            Some(m) => m(x, y),
        }
    }

    /// `det dh/dx` at `x`; square maps only. Falls back to central
    /// differences when no evaluator was registered.
    pub fn jacobian_det(&self, x: &[f64]) -> Result<f64> {
        if self.map.is_none() {
            return Ok(1.0);
        }
        if let Some(j) = &self.jacobian_det {
            return Ok(j(x));
        }
        if self.in_dim != self.out_dim {
            return Err(Error::Unsupported(
                "Jacobian determinant of a non-square output map".into(),
            ));
        }
        let d = self.in_dim;
        let mut jac = DMatrix::zeros(d, d);
        let mut xp = x.to_vec();
        let mut yp = vec![0.0; d];
        let mut ym = vec![0.0; d];
        for k in 0..d {
            let h = fd_step(x[k]);
            xp[k] = x[k] + h;
            self.apply(&xp, &mut yp);
            xp[k] = x[k] - h;
            self.apply(&xp, &mut ym);
            xp[k] = x[k];
            for i in 0..d {
                jac[(i, k)] = (yp[i] - ym[i]) / (2.0 * h);
            }
        }
        Ok(jac.determinant())
    }
}

pub(crate) fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// Deterministic ODE on the extended state `(x, p)`: states evolve by the
/// drift, parameters are constant.
#[derive(Clone)]
pub struct OdeModel {
    id: String,
    n_states: usize,
    n_params: usize,
    drift: VectorField,
    divergence: Option<ScalarField>,
    output: OutputMap,
}

impl fmt::Debug for OdeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeModel")
            .field("id", &self.id)
            .field("n_states", &self.n_states)
            .field("n_params", &self.n_params)
            .field("analytic_divergence", &self.divergence.is_some())
            .field("output", &self.output)
            .finish()
    }
}

impl OdeModel {
    /// `drift` receives the full extended state and writes the `n_states`
    /// state derivatives.
    pub fn new(id: impl Into<String>, n_states: usize, n_params: usize, drift: VectorField) -> Self {
        let d = n_states + n_params;
        OdeModel {
            id: id.into(),
            n_states,
            n_params,
            drift,
            divergence: None,
            output: OutputMap::identity(d),
        }
    }

    pub fn with_divergence(mut self, div: ScalarField) -> Self {
        self.divergence = Some(div);
        self
    }

    pub fn with_output(mut self, output: OutputMap) -> Self {
        self.output = output;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.n_states + self.n_params
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn output(&self) -> &OutputMap {
        &self.output
    }

    /// Extended drift; the parameter block is zero.
    pub fn drift(&self, x: &[f64], out: &mut [f64]) {
        (self.drift)(x, &mut out[..self.n_states]);
        out[self.n_states..].iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn has_analytic_divergence(&self) -> bool {
        self.divergence.is_some()
    }

    /// Divergence of the extended drift.
    pub fn divergence(&self, x: &[f64]) -> f64 {
        if let Some(div) = &self.divergence {
            return div(x);
        }
        let ns = self.n_states;
        let mut xp = x.to_vec();
        let mut fp = vec![0.0; ns];
        let mut fm = vec![0.0; ns];
        let mut s = 0.0;
        for k in 0..ns {
            let h = fd_step(x[k]);
            xp[k] = x[k] + h;
            (self.drift)(&xp, &mut fp);
            xp[k] = x[k] - h;
            (self.drift)(&xp, &mut fm);
            xp[k] = x[k];
            s += (fp[k] - fm[k]) / (2.0 * h);
        }
        s
    }
}

/// Diffusion matrix evaluator writing a row-major `d x w` matrix.
pub type DiffusionField = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Ito SDE `dx = f(x) dt + g(x) dB` with `E[dB dB^T] = Q dt`, `Q` diagonal.
#[derive(Clone)]
pub struct SdeModel {
    id: String,
    dim: usize,
    noise_dim: usize,
    drift: VectorField,
    diffusion: DiffusionField,
    q: Vec<f64>,
    output: OutputMap,
}

impl fmt::Debug for SdeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SdeModel")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("noise_dim", &self.noise_dim)
            .field("q", &self.q)
            .finish()
    }
}

impl SdeModel {
    pub fn new(
        id: impl Into<String>,
        dim: usize,
        drift: VectorField,
        diffusion: DiffusionField,
        q: Vec<f64>,
    ) -> Result<Self> {
        if q.is_empty() || q.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("noise intensities must be positive"));
        }
        Ok(SdeModel {
            id: id.into(),
            dim,
            noise_dim: q.len(),
            drift,
            diffusion,
            q,
            output: OutputMap::identity(dim),
        })
    }

    /// Constant diffusion matrix (row-major `dim x w`).
    pub fn additive(
        id: impl Into<String>,
        dim: usize,
        drift: VectorField,
        g: Vec<f64>,
        q: Vec<f64>,
    ) -> Result<Self> {
        if g.len() != dim * q.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * q.len(),
                got: g.len(),
            });
        }
        Self::new(id, dim, drift, Arc::new(move |_, out: &mut [f64]| out.copy_from_slice(&g)), q)
    }

    pub fn with_output(mut self, output: OutputMap) -> Self {
        self.output = output;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn output(&self) -> &OutputMap {
        &self.output
    }

    pub fn drift(&self, x: &[f64], out: &mut [f64]) {
        (self.drift)(x, out)
    }

    pub fn diffusion(&self, x: &[f64], out: &mut [f64]) {
        (self.diffusion)(x, out)
    }
}

/// One-dimensional discrete-time map.
#[derive(Clone)]
pub enum MapModel {
    /// `x -> T(x)` on `[domain.0, domain.1]`. When `preimages` is present the
    /// Perron-Frobenius step sums over exact preimages; otherwise an Ulam
    /// transfer matrix is used.
    Deterministic {
        map: Fn1,
        preimages: Option<PreimageFn>,
        domain: (f64, f64),
    },
    /// `x -> zeta S(x)` with noise density `phi`.
    MultiplicativeNoise { s: Fn1, phi: Fn1 },
    /// `x -> S(x) + zeta` with noise density `phi`.
    AdditiveNoise { s: Fn1, phi: Fn1 },
}

impl fmt::Debug for MapModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapModel::Deterministic {
                preimages, domain, ..
            } => f
                .debug_struct("Deterministic")
                .field("exact_preimages", &preimages.is_some())
                .field("domain", domain)
                .finish(),
            MapModel::MultiplicativeNoise { .. } => f.write_str("MultiplicativeNoise"),
            MapModel::AdditiveNoise { .. } => f.write_str("AdditiveNoise"),
        }
    }
}

impl MapModel {
    /// `x -> cos(2 arccos x)` on `[-1, 1]`.
    pub fn chebyshev() -> Self {
        MapModel::Deterministic {
            map: Arc::new(|x: f64| (2.0 * x.clamp(-1.0, 1.0).acos()).cos()),
            preimages: Some(Arc::new(|x: f64| {
                let r = ((x + 1.0) / 2.0).max(0.0).sqrt();
                // |T'(+-r)| = 4 r for T(x) = 2x^2 - 1
                let d = 4.0 * r;
                vec![(r, d), (-r, d)]
            })),
            domain: (-1.0, 1.0),
        }
    }

    /// `x -> 4 x (1 - x)` on `[0, 1]`.
    pub fn logistic() -> Self {
        MapModel::Deterministic {
            map: Arc::new(|x: f64| 4.0 * x * (1.0 - x)),
            preimages: Some(Arc::new(|x: f64| {
                let s = (1.0 - x).max(0.0).sqrt();
                let d = 4.0 * s;
                vec![((1.0 + s) / 2.0, d), ((1.0 - s) / 2.0, d)]
            })),
            domain: (0.0, 1.0),
        }
    }

    /// Generic deterministic map handled by an Ulam transfer matrix.
    pub fn deterministic(map: Fn1, domain: (f64, f64)) -> Self {
        MapModel::Deterministic {
            map,
            preimages: None,
            domain,
        }
    }

    /// `x -> zeta x (1 - x)`.
    pub fn logistic_multiplicative(phi: Fn1) -> Self {
        MapModel::MultiplicativeNoise {
            s: Arc::new(|x: f64| x * (1.0 - x)),
            phi,
        }
    }

    /// `x -> x + zeta`.
    pub fn additive_identity(phi: Fn1) -> Self {
        MapModel::AdditiveNoise {
            s: Arc::new(|x: f64| x),
            phi,
        }
    }

    /// Standard normal density restricted to `[lo, hi]` (not renormalized,
    /// matching the truncated-integral convention).
    pub fn truncated_normal(lo: f64, hi: f64) -> Fn1 {
        Arc::new(move |z: f64| {
            if z < lo || z > hi {
                0.0
            } else {
                crate::special::norm_pdf(z)
            }
        })
    }

    /// Apply a deterministic map to a point.
    pub fn apply(&self, x: f64) -> Result<f64> {
        match self {
            MapModel::Deterministic { map, .. } => Ok(map(x)),
            _ => Err(Error::Unsupported(
                "pointwise evaluation of a stochastic map".into(),
            )),
        }
    }
}
