//! Wasserstein-distance model validation for uncertain dynamical systems.
//!
//! The crate is organised around five layers:
//!
//! * [`densities`]: particle ensembles, parametric families, CDFs and quantiles.
//! * [`dynamics`]: density propagation (Liouville characteristics, Euler–Maruyama,
//!   Perron–Frobenius) and stationary densities.
//! * [`transport`]: order-2 Wasserstein distances (network simplex, 1-D quantile
//!   formula, Gaussian closed form) and asymptotic gaps.
//! * [`certificates`]: sample-size formulas and PRVC/PWVC construction.
//! * [`analytic`]: closed-form gaps and diagnostic calculators.
//!
//! The `valctl` binary drives the full pipeline from a JSON config.

pub mod analytic;
pub mod certificates;
pub mod densities;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod quadrature;
pub mod special;
pub mod transport;
pub mod valctl;

pub use error::{Error, Result};
