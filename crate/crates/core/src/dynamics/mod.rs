//! Dynamical models and forward propagation of densities.
//!
//! Continuous-time deterministic models are propagated along
//! characteristics of the Liouville equation, stochastic ones by
//! Euler-Maruyama Monte Carlo, and one-dimensional maps through their
//! Perron-Frobenius operator on a grid.

mod em;
mod liouville;
mod model;
mod output;
mod pf;
pub mod registry;
mod stationary;

pub use em::{propagate_em, propagate_em_from};
pub use liouville::{
    flow, propagate_liouville, propagate_liouville_from, IntegratorConfig, WeightedDensityEnsemble,
};
pub use model::{
    BranchFn, DiffusionField, Fn1, InverseBranch, MapModel, OdeModel, OutputMap, PreimageFn,
    ScalarField, SdeModel, VectorField,
};
pub use output::{output_pdf, push_output, push_output_weighted};
pub use pf::pf_step;
pub use registry::{build_model, RegisteredModel};
pub use stationary::{
    classify_by_integration, dirac_stationary, linear_gaussian_moments, stationary_hamiltonian,
    stationary_linear_sde, Axis, DensityGrid2D, DiracStationary, LinearHorizon, RoaConfig,
};
