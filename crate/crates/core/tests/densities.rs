mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use wassval::densities::{
    beta_entropy, cdf, raw_moment, raw_moment_ensemble, Cdf1D, DensityFamily, ParticleEnsemble, Scheme,
};

#[test]
fn halton_box_sample_is_uniformly_weighted() {
    let f = DensityFamily::uniform(vec![-PI, -PI], vec![PI, PI]).unwrap();
    let e = f.sample(1000, 0, Scheme::Halton).unwrap();
    assert_eq!(e.len(), 1000);
    assert_eq!(e.dim(), 2);
    assert!(e.weights().iter().all(|w| (*w - 1e-3).abs() < 1e-15));
    assert!(e.iter().all(|(p, _)| p.iter().all(|v| v.abs() <= PI)));
}

#[test]
fn single_draw_has_unit_weight() {
    let g = DensityFamily::gaussian(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    for scheme in [Scheme::Pseudo, Scheme::Halton] {
        let e = g.sample(1, 3, scheme).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.weights(), &[1.0]);
    }
}

#[test]
fn beta_sample_mean_within_three_standard_errors() {
    let (a, b) = (4.0, 1.5);
    let f = DensityFamily::scaled_beta(a, b, 0.0, 1.0).unwrap();
    let n = 100_000;
    let e = f.sample(n, 7, Scheme::Pseudo).unwrap();
    let mean = raw_moment_ensemble(&e, 1).unwrap();
    let var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
    let se = (var / n as f64).sqrt();
    assert!((mean - 8.0 / 11.0).abs() < 3.0 * se, "mean {mean}");
}

#[test]
fn pseudo_sampling_is_seed_deterministic() {
    let g = DensityFamily::isotropic(vec![1.0, -1.0, 0.5], 0.7).unwrap();
    let a = g.sample(50, 11, Scheme::Pseudo).unwrap();
    let b = g.sample(50, 11, Scheme::Pseudo).unwrap();
    let c = g.sample(50, 12, Scheme::Pseudo).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn invalid_families_are_rejected() {
    assert!(DensityFamily::gaussian(vec![0.0], vec![vec![-1.0]]).is_err());
    assert!(DensityFamily::gaussian(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    assert!(DensityFamily::uniform(vec![1.0], vec![0.0]).is_err());
    assert!(DensityFamily::scaled_beta(0.0, 1.0, 0.0, 1.0).is_err());
    assert!(DensityFamily::arcsine(2.0, 2.0).is_err());
    assert!(DensityFamily::dirac_mixture(vec![vec![0.0]], vec![-1.0]).is_err());
    assert!(DensityFamily::isotropic(vec![0.0], f64::NAN).is_err());
    // positive semidefinite covariances (point masses) are allowed
    assert!(DensityFamily::isotropic(vec![0.0], 0.0).is_ok());
}

#[test]
fn cdf_examples() {
    let u = cdf(&DensityFamily::uniform(vec![0.0], vec![1.0]).unwrap()).unwrap();
    assert_abs_diff_eq!(u.eval(0.25), 0.25, epsilon = 1e-15);
    assert_abs_diff_eq!(u.quantile(0.3).unwrap(), 0.3, epsilon = 1e-15);

    let cheb = cdf(&DensityFamily::arcsine(-1.0, 1.0).unwrap()).unwrap();
    let logi = cdf(&DensityFamily::arcsine(0.0, 1.0).unwrap()).unwrap();
    assert_abs_diff_eq!(cheb.eval(0.0), 0.5, epsilon = 1e-14);
    for k in 0..=20 {
        let x = -1.0 + 0.1 * k as f64;
        let want = 2.0 / PI * ((x + 1.0) / 2.0).sqrt().asin();
        assert_abs_diff_eq!(cheb.eval(x), want, epsilon = 1e-13);
        let s = 0.05 * k as f64;
        let half = (PI * s / 2.0).sin().powi(2);
        assert_abs_diff_eq!(cheb.quantile(s).unwrap(), 2.0 * half - 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(logi.quantile(s).unwrap(), half, epsilon = 1e-13);
    }

    let step = Cdf1D::from_ensemble(&ParticleEnsemble::new(vec![vec![0.0], vec![1.0]], None).unwrap()).unwrap();
    assert_abs_diff_eq!(step.eval(0.5), 0.5, epsilon = 1e-15);
    assert_eq!(step.quantile(0.5).unwrap(), 0.0);
    assert_eq!(step.quantile(0.50001).unwrap(), 1.0);
    assert!(step.quantile(1.5).is_err());
}

#[test]
fn quantile_inverts_cdf() {
    let families = [
        DensityFamily::gaussian(vec![0.3], vec![vec![2.0]]).unwrap(),
        DensityFamily::scaled_beta(2.5, 0.7, -1.0, 3.0).unwrap(),
        DensityFamily::arcsine(-3.0, 3.0).unwrap(),
    ];
    for f in &families {
        let c = cdf(f).unwrap();
        for k in 1..20 {
            let s = k as f64 / 20.0;
            assert_abs_diff_eq!(c.eval(c.quantile(s).unwrap()), s, epsilon = 1e-10);
        }
    }
}

#[test]
fn cdf_needs_one_dimension() {
    let g = DensityFamily::isotropic(vec![0.0, 0.0], 1.0).unwrap();
    assert!(cdf(&g).is_err());
}

#[test]
fn raw_moment_examples() {
    let (a, b) = (-3.0, 3.0);
    let u = DensityFamily::uniform(vec![a], vec![b]).unwrap();
    let arc = DensityFamily::arcsine(a, b).unwrap();
    assert_abs_diff_eq!(raw_moment(&u, 2).unwrap(), (a * a + b * b + a * b) / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(raw_moment(&arc, 2).unwrap(), (3.0 * a * a + 3.0 * b * b + 2.0 * a * b) / 8.0, epsilon = 1e-12);
    let (a, b) = (0.5, 2.0);
    let arc = DensityFamily::arcsine(a, b).unwrap();
    assert_abs_diff_eq!(raw_moment(&arc, 2).unwrap(), (3.0 * a * a + 3.0 * b * b + 2.0 * a * b) / 8.0, epsilon = 1e-12);
    assert_abs_diff_eq!(raw_moment(&arc, 1).unwrap(), 1.25, epsilon = 1e-12);
    let g = DensityFamily::gaussian(vec![1.5], vec![vec![0.49]]).unwrap();
    assert_abs_diff_eq!(raw_moment(&g, 2).unwrap(), 1.5 * 1.5 + 0.49, epsilon = 1e-12);
    assert_abs_diff_eq!(raw_moment(&g, 1).unwrap(), 1.5, epsilon = 1e-12);
}

#[test]
fn ensemble_moments_use_weights() {
    let e = ParticleEnsemble::new(vec![vec![1.0], vec![3.0]], Some(vec![3.0, 1.0])).unwrap();
    assert_abs_diff_eq!(raw_moment_ensemble(&e, 1).unwrap(), 1.5, epsilon = 1e-15);
    assert_abs_diff_eq!(raw_moment_ensemble(&e, 2).unwrap(), 3.0, epsilon = 1e-15);
}

#[test]
fn beta_entropy_examples() {
    assert_abs_diff_eq!(beta_entropy(1.0, 1.0).unwrap(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(beta_entropy(4.0, 1.5).unwrap(), beta_entropy(1.5, 4.0).unwrap(), epsilon = 1e-12);
    // -int eta log eta for Beta(2, 2): eta = 6x(1-x)
    let direct = -common::graded_unit_integral(|x| {
        let eta = 6.0 * x * (1.0 - x);
        if eta > 0.0 {
            eta * eta.ln()
        } else {
            0.0
        }
    });
    assert_abs_diff_eq!(beta_entropy(2.0, 2.0).unwrap(), direct, epsilon = 1e-8);
    assert!(beta_entropy(-1.0, 2.0).is_err());
}

#[test]
fn ensemble_validation_and_csv_round_trip() {
    assert!(ParticleEnsemble::new(vec![vec![0.0], vec![1.0, 2.0]], None).is_err());
    assert!(ParticleEnsemble::new(vec![vec![f64::NAN]], None).is_err());
    assert!(ParticleEnsemble::new(vec![vec![0.0]], Some(vec![-1.0])).is_err());
    assert!(ParticleEnsemble::new(vec![vec![0.0], vec![1.0]], Some(vec![1.0])).is_err());

    let e = ParticleEnsemble::new(vec![vec![0.25, -1.0], vec![3.5, 2.0]], Some(vec![0.2, 0.8])).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    e.write_csv(&path).unwrap();
    let back = ParticleEnsemble::read_csv(&path).unwrap();
    assert_eq!(back.dim(), 2);
    assert_eq!(back.flat_points(), e.flat_points());
    for (a, b) in back.weights().iter().zip(e.weights()) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
    }
}

#[test]
fn unnormalized_weights_are_rescaled() {
    let e = ParticleEnsemble::new(vec![vec![0.0], vec![1.0]], Some(vec![2.0, 6.0])).unwrap();
    assert_abs_diff_eq!(e.weights()[0], 0.25, epsilon = 1e-15);
    assert_abs_diff_eq!(e.weights()[1], 0.75, epsilon = 1e-15);
}

#[test]
fn family_json_round_trip() {
    let f = DensityFamily::scaled_beta(4.0, 1.5, -1.0, 2.0).unwrap();
    let text = serde_json::to_string(&f).unwrap();
    let back: DensityFamily = serde_json::from_str(&text).unwrap();
    assert_eq!(cdf(&back).unwrap(), cdf(&f).unwrap());
}
