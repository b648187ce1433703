//! Density representations, sampling, CDFs/quantiles and moments.

mod cdf;
mod ensemble;
mod family;
mod grid;
pub mod halton;
mod moments;

pub use cdf::{cdf, Cdf1D};
pub use ensemble::ParticleEnsemble;
pub use family::{DensityFamily, Scheme};
pub use grid::DensityGrid1D;
pub use moments::{beta_entropy, raw_moment, raw_moment_ensemble};
