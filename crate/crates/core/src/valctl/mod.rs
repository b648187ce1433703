//! Library side of the `valctl` command-line driver: config schema, the
//! validation pipeline, report and plot-data emission, and calculators.

pub mod calc;
mod config;
mod plot;
mod run;

pub use config::{CertKind, DataSpec, LtiSpec, ModelSpec, OutputSpec, PrajnaSpec, ValidationConfig};
pub use plot::emit_plot_data;
pub use run::{read_data_dir, run_validate, write_report, Metadata, Report, Series, Timings, Warning};

/// Exit code for a completed run.
pub const EXIT_OK: i32 = 0;
/// Exit code for any error.
pub const EXIT_ERROR: i32 = 1;
/// Exit code when the hard invalidation check rejects the model.
pub const EXIT_INVALIDATED: i32 = 2;
