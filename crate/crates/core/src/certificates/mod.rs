//! Randomized validation certificates.
//!
//! A certificate summarizes, per snapshot, how often (PRVC) or by how much at
//! worst (PWVC) a model's output density differs from measured data in W2,
//! over initial densities drawn from an [`InitialDensityLaw`].

mod certificate;
mod law;
mod simulate;

pub use certificate::{
    construct_prvc, construct_pwvc, ensemble_gap, gap_matrix, prvc_from_gaps, prvc_values,
    pwvc_from_gaps, pwvc_values, CertificateInputs, CertificateKind, DataSource, GapMatrix,
    SamplingMode, Snapshot, ToleranceSchedule, ValidationCertificate,
};
pub use law::{Draw, InitialDensityLaw};
pub use simulate::{simulate, SimConfig, Weighting};

use crate::transport::ceil_count;
use crate::{Error, Result};

fn check_eps_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon = {epsilon} is outside (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta = {delta} is outside (0, 1)")));
    }
    Ok(())
}

/// Chernoff sample size `ceil(ln(2/delta) / (2 eps^2))`.
pub fn n_chernoff(epsilon: f64, delta: f64) -> Result<u64> {
    check_eps_delta(epsilon, delta)?;
    Ok(ceil_count((2.0 / delta).ln() / (2.0 * epsilon * epsilon)))
}

/// Worst-case sample size `ceil(ln(1/delta) / ln(1/(1 - eps)))`.
pub fn n_worstcase(epsilon: f64, delta: f64) -> Result<u64> {
    check_eps_delta(epsilon, delta)?;
    Ok(ceil_count((1.0 / delta).ln() / (-(-epsilon).ln_1p())))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::densities::{DensityFamily, Scheme};
    use crate::dynamics::build_model;

    #[test]
    fn sample_sizes() {
        assert_eq!(n_chernoff(0.1, 0.05).unwrap(), 185);
        assert_eq!(n_worstcase(0.1, 0.05).unwrap(), 29);
        assert_eq!(n_worstcase(0.5, 0.5).unwrap(), 1);
        assert_eq!(n_chernoff(1.0 - 1e-12, 2.0 / std::f64::consts::E).unwrap(), 1);
        assert!(n_chernoff(0.0, 0.1).is_err());
        assert!(n_chernoff(0.1, 1.0).is_err());
        assert!(n_worstcase(1.0, 0.1).is_err());
    }

    fn scalar_setup() -> (crate::dynamics::RegisteredModel, InitialDensityLaw, SimConfig) {
        let model = build_model("scalar_linear", &BTreeMap::new()).unwrap();
        let law = InitialDensityLaw::GaussianSigmaGrid {
            mean: vec![0.5],
            sigmas: vec![0.5, 1.0, 1.5],
        };
        let sim = SimConfig {
            nu: 200,
            dt: 0.01,
            scheme: Scheme::Halton,
            seed: 7,
            weighting: Weighting::Carried,
        };
        (model, law, sim)
    }

    #[test]
    fn self_validation_and_infinite_tolerance() {
        let (model, law, sim) = scalar_setup();
        let times = [0.5, 1.0, 1.5];
        let data = DataSource::Reference(model.clone());
        let inp = CertificateInputs {
            data: &data,
            model: &model,
            law: &law,
            times: &times,
            epsilon: 0.2,
            delta: 0.1,
            sim,
            mode: SamplingMode::Random,
        };
        let (c, g) = construct_prvc(&inp, &ToleranceSchedule::constant(1e-9, 3).unwrap()).unwrap();
        assert_eq!(c.n, n_chernoff(0.2, 0.1).unwrap() as usize);
        assert!(g.gaps.iter().flatten().all(|v| *v == 0.0));
        assert!(c.values().iter().all(|v| *v == 1.0));

        let other = build_model("scalar_affine", &[("b".to_string(), 3.0)].into()).unwrap();
        let inp2 = CertificateInputs { model: &other, ..inp.clone() };
        let (c, _) = construct_prvc(&inp2, &ToleranceSchedule::constant(1e300, 3).unwrap()).unwrap();
        assert!(c.values().iter().all(|v| *v == 1.0));
        let err = construct_prvc(&inp2, &ToleranceSchedule::constant(1.0, 2).unwrap()).unwrap_err();
        assert_eq!(err.code(), "TOL_LEN");
    }

    #[test]
    fn pwvc_dominates_and_point_mass() {
        let (model, law, sim) = scalar_setup();
        let times = [0.5, 1.0];
        let truth = build_model("scalar_linear", &[("a".to_string(), -2.0)].into()).unwrap();
        let data = DataSource::Reference(truth);
        let inp = CertificateInputs {
            data: &data,
            model: &model,
            law: &law,
            times: &times,
            epsilon: 0.3,
            delta: 0.2,
            sim,
            mode: SamplingMode::Random,
        };
        let (c, g) = construct_pwvc(&inp).unwrap();
        for row in &g.gaps {
            for (v, s) in row.iter().zip(&c.snapshots) {
                assert!(*v <= s.value);
            }
        }
        let point = InitialDensityLaw::point(DensityFamily::isotropic(vec![0.5], 1.0).unwrap());
        let inp1 = CertificateInputs { law: &point, ..inp.clone() };
        let (c1, g1) = construct_pwvc(&inp1).unwrap();
        assert_eq!(c1.values(), g1.gaps[0]);

        // PRVC monotone in gamma and a multiple of 1/N
        let lo = prvc_values(&g, &ToleranceSchedule::constant(0.05, 2).unwrap()).unwrap();
        let hi = prvc_values(&g, &ToleranceSchedule::constant(0.2, 2).unwrap()).unwrap();
        for (a, b) in lo.iter().zip(&hi) {
            assert!(a <= b);
            let k = a * g.n() as f64;
            assert_eq!(k, k.round());
        }
    }

    #[test]
    fn exhaustive_and_determinism() {
        let (model, law, sim) = scalar_setup();
        let times = [1.0];
        let data = DataSource::Reference(build_model("scalar_linear", &[("a".to_string(), -0.5)].into()).unwrap());
        let inp = CertificateInputs {
            data: &data,
            model: &model,
            law: &law,
            times: &times,
            epsilon: 0.1,
            delta: 0.05,
            sim,
            mode: SamplingMode::Exhaustive,
        };
        let (c, g) = construct_pwvc(&inp).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.values()[0], g.gaps[2][0]);
        let (c2, _) = construct_pwvc(&inp).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), serde_json::to_string(&c2).unwrap());
    }
}
