use rand::SeedableRng;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::liouville::{check_grid, steps_for};
use super::SdeModel;
use crate::densities::{DensityFamily, ParticleEnsemble, Scheme};
use crate::{Error, Result};

/// Euler-Maruyama Monte Carlo.
///
/// Particle `i` draws its increments from a ChaCha8 stream `i + 1` of the
/// generator seeded with `seed`; stream 0 is left to initial sampling.
pub fn propagate_em(
    model: &SdeModel,
    initial: &DensityFamily,
    n: usize,
    t_grid: &[f64],
    dt: f64,
    seed: u64,
    scheme: Scheme,
) -> Result<Vec<ParticleEnsemble>> {
    if initial.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: initial.dim(),
        });
    }
    let ens = initial.sample(n, seed, scheme)?;
    propagate_em_from(model, &ens, t_grid, dt, seed)
}

/// Euler-Maruyama from a given ensemble.
pub fn propagate_em_from(
    model: &SdeModel,
    initial: &ParticleEnsemble,
    t_grid: &[f64],
    dt: f64,
    seed: u64,
) -> Result<Vec<ParticleEnsemble>> {
    let d = model.dim();
    if initial.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: initial.dim(),
        });
    }
    check_grid(t_grid, dt)?;
    let mut prev = 0.0;
    for &t in t_grid {
        if t > prev && dt > t - prev + 1e-12 {
            return Err(Error::invalid("dt exceeds the time grid spacing"));
        }
        prev = t;
    }
    let w = model.noise_dim();
    let sq: Vec<f64> = model.q().iter().map(|q| q.sqrt()).collect();
    let paths: Vec<Vec<f64>> = (0..initial.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let mut x = initial.point(i).to_vec();
            let mut f = vec![0.0; d];
            let mut g = vec![0.0; d * w];
            let mut z = vec![0.0; w];
            let mut rows = Vec::with_capacity(t_grid.len() * d);
            let mut t = 0.0;
            for &tk in t_grid {
                let steps = steps_for(tk - t, dt);
                let h = if steps > 0 { (tk - t) / steps as f64 } else { 0.0 };
                let sh = h.sqrt();
                for s in 0..steps {
                    model.drift(&x, &mut f);
                    model.diffusion(&x, &mut g);
                    for (l, zl) in z.iter_mut().enumerate() {
                        let e: f64 = rng.sample(StandardNormal);
                        *zl = e * sq[l] * sh;
                    }
                    for r in 0..d {
                        let mut inc = f[r] * h;
                        for l in 0..w {
                            inc += g[r * w + l] * z[l];
                        }
                        x[r] += inc;
                    }
                    if x.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Propagation {
                            particle: i,
                            time: t + (s + 1) as f64 * h,
                            reason: "non-finite state".into(),
                        });
                    }
                }
                t = tk;
                rows.extend_from_slice(&x);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    t_grid
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let mut pts = Vec::with_capacity(initial.len() * d);
            for p in &paths {
                pts.extend_from_slice(&p[k * d..(k + 1) * d]);
            }
            ParticleEnsemble::from_flat(d, pts, Some(initial.weights().to_vec()))
        })
        .collect()
}
