//! Order-2 Wasserstein distances and related quantities.

mod asymptotic;
mod complexity;
mod gaussian;
mod one_d;
mod plan;
mod simplex;

pub use asymptotic::{asymptotic_gap, AsymptoticCase};
pub use complexity::{build_constraint_matrix, n_wass, n_wass_real, SampleComplexityParams, SparseMatrix};
pub(crate) use complexity::ceil_count;
pub use gaussian::{bures_sq, bures_sq_factors, w2_gaussian, w2_gaussian_moments};
pub use one_d::{coupling_cdf, w2_1d};
pub use plan::{w2_lp, TransportPlan};

use std::io::Write;

/// Write a distance series as CSV `t,w2`.
pub fn write_series_csv<W: Write>(writer: W, series: &[(f64, f64)]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "w2"])?;
    for (t, v) in series {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
