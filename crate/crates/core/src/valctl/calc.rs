use std::path::Path;

use serde_json::{json, Value};

use crate::analytic::{
    beta_beta_w2, lti_bounds, prajna_check, w2_scalar_affine, Interval, LtiPair, ScalarLinearPair,
};
use crate::certificates::{n_chernoff, n_worstcase};
use crate::densities::{cdf, Cdf1D, DensityFamily, ParticleEnsemble};
use crate::linalg::{from_rows, to_rows};
use crate::quadrature::QuadConfig;
use crate::transport::{n_wass, w2_1d, w2_gaussian, w2_lp, SampleComplexityParams};
use crate::{Error, Result};

/// Round to 12 significant digits so values like `1.2100000000000002`
/// print as `1.21`.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn square(v: &[f64], what: &str) -> Result<Vec<Vec<f64>>> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() || n == 0 {
        return Err(Error::config("ARGS", format!("{what} needs n*n row-major entries, got {}", v.len())));
    }
    Ok(v.chunks(n).map(|r| r.to_vec()).collect())
}

/// Load an ensemble CSV or a density-family JSON file.
pub enum Source {
    Ensemble(ParticleEnsemble),
    Family(DensityFamily),
}

pub fn load_source(path: &Path) -> Result<Source> {
    if path.extension().is_some_and(|e| e == "json") {
        let f: DensityFamily = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        f.validate()?;
        Ok(Source::Family(f))
    } else {
        Ok(Source::Ensemble(ParticleEnsemble::read_csv(path)?))
    }
}

pub fn calc_w2_lp(source: &Path, target: &Path, plan_out: Option<&Path>) -> Result<Value> {
    let a = ParticleEnsemble::read_csv(source)?;
    let b = ParticleEnsemble::read_csv(target)?;
    let (w2, plan) = w2_lp(&a, &b)?;
    if let Some(p) = plan_out {
        plan.save_csv(p)?;
    }
    Ok(json!({
        "inputs": {"source": source, "target": target, "m": a.len(), "n": b.len(), "dim": a.dim()},
        "w2": w2,
        "cost": plan.cost,
        "support": plan.entries.len(),
        "feasibility_residual": plan.feasibility_residual(),
    }))
}

pub fn calc_w2_1d(source: &Path, target: &Path) -> Result<Value> {
    let to_cdf = |p: &Path| -> Result<Cdf1D> {
        match load_source(p)? {
            Source::Ensemble(e) => Cdf1D::from_ensemble(&e),
            Source::Family(f) => cdf(&f),
        }
    };
    let w2 = w2_1d(&to_cdf(source)?, &to_cdf(target)?, &QuadConfig::default())?;
    Ok(json!({"inputs": {"source": source, "target": target}, "w2": w2}))
}

pub fn calc_w2_gauss(m1: &[f64], cov1: &[f64], m2: &[f64], cov2: &[f64]) -> Result<Value> {
    let g1 = DensityFamily::gaussian(m1.to_vec(), square(cov1, "cov1")?)?;
    let g2 = DensityFamily::gaussian(m2.to_vec(), square(cov2, "cov2")?)?;
    let w2 = w2_gaussian(&g1, &g2)?;
    Ok(json!({"inputs": {"m1": m1, "cov1": cov1, "m2": m2, "cov2": cov2}, "w2": w2}))
}

pub fn calc_beta_w2(alpha: f64, beta: f64) -> Result<Value> {
    Ok(json!({"inputs": {"alpha": alpha, "beta": beta}, "w2": beta_beta_w2(alpha, beta)?}))
}

/// Scalar linear or affine gap at time `t`.
pub fn calc_scalar_gap(pair: &ScalarLinearPair, m10: f64, m20: f64, t: f64) -> Result<Value> {
    pair.validate()?;
    let w2 = w2_scalar_affine(pair, m10, m20, t)?;
    Ok(json!({"inputs": {"pair": pair, "m10": m10, "m20": m20, "t": t}, "w2": w2}))
}

pub fn calc_lti_bounds(a: &[f64], a_hat: &[f64], p0: &[f64], k_max: u32) -> Result<Value> {
    let pair = LtiPair::new(
        from_rows(&square(a, "a")?)?,
        from_rows(&square(a_hat, "a-hat")?)?,
        from_rows(&square(p0, "p0")?)?,
    )?;
    let rows = (0..=k_max).map(|k| lti_bounds(&pair, k)).collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "inputs": {"a": to_rows(&pair.a), "a_hat": to_rows(&pair.a_hat), "p0": to_rows(&pair.p0), "k_max": k_max},
        "bounds": rows,
    }))
}

pub fn calc_n_chernoff(eps: f64, delta: f64) -> Result<Value> {
    Ok(json!({"inputs": {"eps": eps, "delta": delta}, "n": n_chernoff(eps, delta)?}))
}

pub fn calc_n_worstcase(eps: f64, delta: f64) -> Result<Value> {
    Ok(json!({"inputs": {"eps": eps, "delta": delta}, "n": n_worstcase(eps, delta)?}))
}

pub fn calc_n_wass(p: &SampleComplexityParams) -> Result<Value> {
    Ok(json!({"inputs": p, "n": n_wass(p)?}))
}

pub fn calc_prajna(x0: [f64; 2], xt: [f64; 2], p: [f64; 2], t: f64) -> Result<Value> {
    let r = prajna_check(
        Interval::new(x0[0], x0[1])?,
        Interval::new(xt[0], xt[1])?,
        Interval::new(p[0], p[1])?,
        t,
    )?;
    Ok(json!({
        "inputs": {"x0": x0, "xT": xt, "p": p, "T": t},
        "witness": round_sig(r.witness),
        "verdict": r.verdict,
    }))
}
