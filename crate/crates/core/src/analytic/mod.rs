//! Closed-form gaps, bounds and diagnostics.

mod beta;
mod diagnostics;
mod lti;
mod prajna;
mod scalar;

pub use beta::{beta_beta_w2, cross_integral, inverse_beta_second_moment};
pub use diagnostics::{gaussian_kl_diag, log_noise_sign, KlDiagnostic, NoiseClass, NoiseLaw};
pub use lti::{lti_bounds, LtiBounds, LtiPair};
pub use prajna::{cubic_density_transport, prajna_check, Interval, PrajnaResult, Verdict};
pub use scalar::{
    s_statistic, w2_scalar_affine, w2_scalar_discrete, w2_scalar_linear, w2_scalar_sde,
    ScalarLinearPair,
};
