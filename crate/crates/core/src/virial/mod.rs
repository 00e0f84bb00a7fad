//! Weighted functionals and their time derivatives.
//!
//! Every right-hand side is returned as a [`Breakdown`]: one [`Term`] per
//! integral, each carrying the value obtained by differentiating the
//! functional along the equations (`derived`) and the value of the
//! corresponding term with the coefficients as they are usually printed
//! (`printed`). Only the derived total is expected to match a finite
//! difference of the functional; the printed total is kept for comparison.

pub mod certificates;
pub mod farfield;
pub mod functionals;
pub mod scaling;
pub mod weights;
pub mod windows;

use serde::Serialize;

pub use certificates::{positivity_certificate, quadratic_form_minorant, AlphaBranch, MinorantReport, PositivityReport};
pub use farfield::{farfield_energy, farfield_energy_rhs, farfield_mass, farfield_mass_rhs, FarFieldEnergy};
pub use functionals::{
    functional_i, functional_i_tilde, functional_j, virial_rhs_i, virial_rhs_i_tilde, virial_rhs_j, Branch, IParts,
    VirialFrame,
};
pub use scaling::{integrability_ledger, FarFieldScaling, IntegrabilityRow, KappaMode, ScalingSet, ScalingValues, DYNAMIC_KAPPA, LITERAL_KAPPA};
pub use weights::{WeightFamily, WeightKind};
pub use windows::{window_norm, Density, Window, ZetaLaw};

/// Orientation of a characteristic or far-field side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub derived: f64,
    pub printed: f64,
}

impl Term {
    pub fn same(name: &'static str, value: f64) -> Self {
        Term { name, derived: value, printed: value }
    }

    pub fn new(name: &'static str, derived: f64, printed: f64) -> Self {
        Term { name, derived, printed }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Breakdown {
    pub terms: Vec<Term>,
}

impl Breakdown {
    pub fn derived_total(&self) -> f64 {
        self.terms.iter().map(|t| t.derived).sum()
    }

    pub fn printed_total(&self) -> f64 {
        self.terms.iter().map(|t| t.printed).sum()
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn push(&mut self, term: Term) {
        self.terms.push(term);
    }
}
