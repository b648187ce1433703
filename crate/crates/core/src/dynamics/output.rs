use super::{OutputMap, WeightedDensityEnsemble};
use crate::densities::ParticleEnsemble;
use crate::{Error, Result};

/// Map every particle through `h`, carrying weights.
pub fn push_output(states: &ParticleEnsemble, h: &OutputMap) -> Result<ParticleEnsemble> {
    if states.dim() != h.in_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.in_dim(),
            got: states.dim(),
        });
    }
    if h.is_identity() {
        return Ok(states.clone());
    }
    states.map_points(h.out_dim(), |x, y| h.apply(x, y))
}

/// Map particles and their density values. For a square output map each
/// value is divided by `|det dh/dx|` at the particle.
pub fn push_output_weighted(
    states: &WeightedDensityEnsemble,
    h: &OutputMap,
) -> Result<WeightedDensityEnsemble> {
    let ensemble = push_output(&states.ensemble, h)?;
    if h.is_identity() {
        return Ok(WeightedDensityEnsemble {
            t: states.t,
            ensemble,
            density: states.density.clone(),
        });
    }
    let density = (0..states.ensemble.len())
        .map(|i| {
            let x = states.ensemble.point(i);
            let j = h.jacobian_det(x)?;
            if j == 0.0 || !j.is_finite() {
                return Err(Error::Singular(format!(
                    "output Jacobian determinant {j} at particle {i}"
                )));
            }
            Ok(states.density[i] / j.abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedDensityEnsemble {
        t: states.t,
        ensemble,
        density,
    })
}

/// Output density at `y`: the sum over inverse branches of
/// `xi(x_j*) / |det J(x_j*)|`.
pub fn output_pdf<F>(y: &[f64], state_pdf: F, h: &OutputMap) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if h.is_identity() {
        return state_pdf(y);
    }
    if h.branches().is_empty() {
        return Err(Error::invalid("output map declares no inverse branches"));
    }
    let mut s = 0.0;
    for br in h.branches() {
        if let Some(x) = (br.preimage)(y) {
            let j = (br.jacobian_det)(&x);
            if j == 0.0 || !j.is_finite() {
                return Err(Error::Singular(format!(
                    "vanishing Jacobian determinant at preimage {x:?} of {y:?}"
                )));
            }
            s += state_pdf(&x)? / j.abs();
        }
    }
    Ok(s)
}
