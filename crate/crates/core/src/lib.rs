//! Pseudospectral simulator and diagnostics laboratory for the 1-D
//! Zakharov-Rubenchik / Benney-Roskes system.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the parameters and derived constants,
//! * [`grid`] the periodic grid, field storage and spectral calculus,
//! * [`dynamics`] the split-step integrator,
//! * [`diagnostics`] conserved quantities and norm monitors,
//! * [`virial`] weights, scalings, weighted functionals and their time derivatives,
//! * [`solitons`] solitary-wave data and the adiabatic NLS reference,
//! * [`experiments`] the config-driven harness, persistence and reports.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod model;
pub mod solitons;
pub mod virial;

pub use error::{Error, Result};
pub use grid::{Grid, SimState};
pub use model::{DerivedConstants, ModelParams};

pub use num_complex::Complex64;
