//! Config-driven experiment harness: runs, run directories and reports.
//!
//! A run writes a self-contained directory; every report reads only that
//! directory, so reports can be regenerated without simulating again.

pub mod config;
pub mod initial;
pub mod plot;
pub mod reports;
pub mod run;
pub mod series;
pub mod snapshot;

pub use config::{AcousticData, DiagnosticsSpec, ExperimentConfig, GridSpec, InitialData, TimeSpec, WindowSpec};
pub use initial::build_initial_state;
pub use plot::plot_run;
pub use reports::{
    adiabatic_limit_report, identity_order, identity_suite, theorem1_trend_report, theorem2_decay_report, Assertion, Report,
};
pub use run::{run, run_many, Evaluator, RunSummary};
pub use series::{FunctionalSeries, IdentityRow, SeriesTable};
pub use snapshot::Snapshot;
