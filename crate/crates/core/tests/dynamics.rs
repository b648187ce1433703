use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use nalgebra::{dmatrix, dvector, DMatrix};

use wassval::densities::{DensityFamily, DensityGrid1D, ParticleEnsemble, Scheme};
use wassval::dynamics::registry::{registry, scalar_affine};
use wassval::dynamics::{
    build_model, dirac_stationary, flow, linear_gaussian_moments, output_pdf, pf_step, propagate_em,
    propagate_liouville, propagate_liouville_from, push_output, IntegratorConfig, LinearHorizon, MapModel,
    OdeModel, OutputMap, RegisteredModel, RoaConfig,
};
use wassval::Error;

fn gauss2_pdf(x: &[f64], s: &DMatrix<f64>) -> f64 {
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    let inv = dmatrix![s[(1, 1)], -s[(0, 1)]; -s[(1, 0)], s[(0, 0)]] / det;
    let v = dvector![x[0], x[1]];
    (-0.5 * (v.transpose() * inv * &v)[(0, 0)]).exp() / (2.0 * PI * det.sqrt())
}

#[test]
fn linear_flow_matches_matrix_exponential() {
    let a = dmatrix![-0.5, 1.0; -1.0, -0.3];
    let am = a.clone();
    let model = OdeModel::new(
        "lin2",
        2,
        0,
        Arc::new(move |x: &[f64], f: &mut [f64]| {
            f[0] = am[(0, 0)] * x[0] + am[(0, 1)] * x[1];
            f[1] = am[(1, 0)] * x[0] + am[(1, 1)] * x[1];
        }),
    );
    let cov0 = dmatrix![1.0, 0.2; 0.2, 0.5];
    let init = DensityFamily::gaussian(vec![0.0, 0.0], vec![vec![1.0, 0.2], vec![0.2, 0.5]]).unwrap();
    let cfg = IntegratorConfig {
        dt: 0.01,
        scheme: Scheme::Halton,
        seed: 0,
    };
    let times = [0.5, 2.0];
    let out = propagate_liouville(&model, &init, 200, &times, &cfg).unwrap();
    for (snap, t) in out.iter().zip(times) {
        let phi = (&a * t).exp();
        let cov = &phi * &cov0 * phi.transpose();
        // density along characteristics is the pushforward Gaussian
        for i in 0..snap.ensemble.len() {
            let x = snap.ensemble.point(i);
            let want = gauss2_pdf(x, &cov);
            assert!((snap.density[i] - want).abs() <= 1e-8 * want.max(1.0), "{} vs {want}", snap.density[i]);
        }
        let x0 = init.sample(200, 0, Scheme::Halton).unwrap();
        let p = x0.point(7);
        let want = &phi * dvector![p[0], p[1]];
        assert_abs_diff_eq!(snap.ensemble.point(7)[0], want[0], epsilon = 1e-8);
        assert_abs_diff_eq!(snap.ensemble.point(7)[1], want[1], epsilon = 1e-8);
    }
}

#[test]
fn scalar_linear_density_grows_exponentially() {
    let a = -0.7;
    let m = scalar_affine(a, 0.0, 1.0, 0.0);
    let ens = ParticleEnsemble::new(vec![vec![1.0], vec![-2.0], vec![0.4]], None).unwrap();
    let times = [0.25, 1.0, 3.0];
    let out = propagate_liouville_from(&m, &ens, &[0.1, 0.2, 0.3], &times, 0.01).unwrap();
    for (snap, t) in out.iter().zip(times) {
        let g = (-a * t).exp();
        for (i, d0) in [0.1, 0.2, 0.3].iter().enumerate() {
            assert!((snap.density[i] - d0 * g).abs() < 1e-8 * g);
            assert!((snap.ensemble.point(i)[0] - ens.point(i)[0] / g).abs() < 1e-8);
        }
        assert_eq!(snap.t, t);
    }
}

#[test]
fn zero_drift_leaves_everything_fixed() {
    let m = OdeModel::new("still", 2, 0, Arc::new(|_: &[f64], f: &mut [f64]| f.fill(0.0)));
    let ens = ParticleEnsemble::new(vec![vec![1.0, 2.0], vec![-3.0, 0.5]], None).unwrap();
    let out = propagate_liouville_from(&m, &ens, &[0.7, 0.1], &[1.0, 5.0], 0.1).unwrap();
    for snap in &out {
        assert_eq!(snap.ensemble.flat_points(), ens.flat_points());
        assert_abs_diff_eq!(snap.density[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(snap.density[1], 0.1, epsilon = 1e-15);
    }
}

#[test]
fn affine_flow_closed_form() {
    let m = scalar_affine(-1.0, 2.0, 1.0, 0.0);
    for t in [0.1, 1.0, 4.0] {
        let x = flow(&m, &[0.0], t, 0.01).unwrap();
        assert_abs_diff_eq!(x[0], 2.0 * (1.0 - (-t as f64).exp()), epsilon = 1e-9);
    }
}

#[test]
fn liouville_rejects_dimension_mismatch() {
    let m = scalar_affine(-1.0, 0.0, 1.0, 0.0);
    let init = DensityFamily::isotropic(vec![0.0, 0.0], 1.0).unwrap();
    assert!(matches!(
        propagate_liouville(&m, &init, 10, &[1.0], &IntegratorConfig::default()),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn linear_sde_reaches_lyapunov_covariance() {
    // x1'' + c x1' + k x1 = noise of intensity q
    let (k, c, q) = (0.1 + 2.0 * 0.5, 1.0, 0.2);
    let RegisteredModel::Sde(model) = build_model("sine_well_linear_sde", &BTreeMap::new()).unwrap() else {
        panic!("expected an SDE model");
    };
    let init = DensityFamily::isotropic(vec![0.0, 0.0], 0.0).unwrap();
    let n = 4000;
    let out = propagate_em(&model, &init, n, &[30.0], 0.01, 17, Scheme::Pseudo).unwrap();
    let e = &out[0];
    let var = |j: usize| e.iter().map(|(p, w)| p[j] * p[j] * w).sum::<f64>();
    let cov01 = e.iter().map(|(p, w)| p[0] * p[1] * w).sum::<f64>();
    let (v0, v1) = (q / (2.0 * c * k), q / (2.0 * c));
    let tol = |v: f64| 3.0 * v * (2.0 / n as f64).sqrt() + 0.02 * v;
    assert!((var(0) - v0).abs() < tol(v0), "var x1 {}", var(0));
    assert!((var(1) - v1).abs() < tol(v1), "var x2 {}", var(1));
    assert!(cov01.abs() < 3.0 * (v0 * v1 / n as f64).sqrt() + 0.01 * v0, "cov {cov01}");
}

#[test]
fn registry_lists_buildable_models() {
    let ids: Vec<&str> = registry().iter().map(|(id, _)| *id).collect();
    for id in ["sine_well", "sine_well_linear", "cubic", "chebyshev", "logistic", "scalar_affine"] {
        assert!(ids.contains(&id), "{id}");
    }
    for id in ids {
        build_model(id, &BTreeMap::new()).unwrap();
    }
}

#[test]
fn registry_errors() {
    let code = |r: wassval::Result<RegisteredModel>| r.map(|_| ()).unwrap_err().code().to_string();
    assert_eq!(code(build_model("nope", &BTreeMap::new())), "UNKNOWN_MODEL");
    let p: BTreeMap<String, f64> = [("zeta".to_string(), 1.0)].into();
    assert_eq!(code(build_model("sine_well", &p)), "UNKNOWN_PARAM");
    let p: BTreeMap<String, f64> = [("a".to_string(), f64::NAN)].into();
    assert_eq!(code(build_model("sine_well", &p)), "BAD_PARAM");
}

#[test]
fn additive_gaussian_noise_convolves() {
    let map = MapModel::additive_identity(Arc::new(|z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt()));
    let g = DensityGrid1D::from_fn(-30.0, 30.0, 2048, |x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt()).unwrap();
    let next = pf_step(&map, &g).unwrap();
    let want = |x: f64| (-0.25 * x * x).exp() / (4.0 * PI).sqrt();
    assert!(next.sup_diff(want, 5.0) < 1e-6);
    assert_abs_diff_eq!(next.integral(), 1.0, epsilon = 1e-6);
}

#[test]
fn logistic_maps_uniform_to_arcsine_edge() {
    let g = DensityGrid1D::from_fn(0.0, 1.0, 1024, |_| 1.0).unwrap();
    let next = pf_step(&MapModel::logistic(), &g).unwrap();
    for x in [0.2, 0.4, 0.6, 0.8] {
        let want = 1.0 / (2.0 * (1.0 - x as f64).sqrt());
        assert!((next.eval(x) - want).abs() < 1e-3 * want, "{x}: {}", next.eval(x));
    }
}

#[test]
fn output_maps() {
    let ens = ParticleEnsemble::new(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]], None).unwrap();
    let y = push_output(&ens, &OutputMap::projection(3, 2)).unwrap();
    assert_eq!(y.flat_points(), &[1.0, 2.0, 4.0, 5.0]);
    assert!(push_output(&ens, &OutputMap::identity(2)).is_err());

    // y = 2 x with x ~ N(0, 1) gives y ~ N(0, 4)
    let pdf = |x: &[f64]| Ok((-0.5 * x[0] * x[0]).exp() / (2.0 * PI).sqrt());
    for y in [-3.0f64, 0.0, 1.7] {
        let want = (-y * y / 8.0).exp() / (8.0 * PI).sqrt();
        assert_abs_diff_eq!(output_pdf(&[y], pdf, &OutputMap::scale(2.0)).unwrap(), want, epsilon = 1e-15);
    }
}

#[test]
fn discrete_linear_moments_follow_the_recursion() {
    let a = dmatrix![0.9, 0.2; -0.1, 0.7];
    let b = dmatrix![1.0; 0.5];
    let c = dmatrix![1.0, -1.0];
    let q = dmatrix![0.3];
    let mu0 = dvector![1.0, -2.0];
    let s0 = dmatrix![0.5, 0.1; 0.1, 0.4];
    let res = linear_gaussian_moments(&a, &b, &c, &q, &mu0, &s0, &LinearHorizon::Discrete { steps: 5 }).unwrap();
    assert_eq!(res.len(), 6);
    let (mut m, mut s) = (mu0, s0);
    for (mk, sk) in &res {
        assert!((mk - &c * &m).norm() < 1e-14);
        assert!((sk - &c * &s * c.transpose()).norm() < 1e-14);
        m = &a * m;
        s = &a * s * a.transpose() + &b * &q * b.transpose();
    }
}

#[test]
fn dirac_masses_with_custom_classifier() {
    let m = wassval::dynamics::registry::sine_well(0.1, 0.5, 1.0);
    let xi0 = DensityFamily::uniform(vec![-1.0, -1.0], vec![3.0, 1.0]).unwrap();
    let att = vec![vec![-1.0, 0.0], vec![1.0, 0.0]];
    let sign = |x: &[f64]| Some(usize::from(x[0] > 0.0));
    let r = dirac_stationary(&m, &xi0, &att, Some(&sign), 1000, 0, Scheme::Halton, &RoaConfig::default()).unwrap();
    assert_abs_diff_eq!(r.masses[0], 0.25, epsilon = 5e-3);
    assert_abs_diff_eq!(r.masses[1], 0.75, epsilon = 5e-3);
    assert_eq!(r.unconverged, 0);
    assert!(dirac_stationary(&m, &xi0, &[], None, 10, 0, Scheme::Halton, &RoaConfig::default()).is_err());
}
