//! Far-field mass and energy functionals
//!
//! ```text
//! M± = ∫Φ(z)|ψ|²,   E± = ∫Φ(z)(e₁ + e₂),   z = (±x + ζ)/λ
//! ```
//!
//! with Φ the plateau weight, e₁ = ω|ψ_x|² + (γq/2)|ψ|⁴ and e₂ the acoustic
//! part of the energy density.

use std::sync::OnceLock;

use serde::Serialize;

use super::scaling::FarFieldValues;
use super::weights::WeightFamily;
use super::{Breakdown, Sign, Term};
use crate::diagnostics::FieldBundle;
use crate::grid::Grid;
use crate::model::ModelParams;

fn plateau() -> &'static WeightFamily {
    static PLATEAU: OnceLock<WeightFamily> = OnceLock::new();
    PLATEAU.get_or_init(WeightFamily::far_field_plateau)
}

struct Samples {
    z: Vec<f64>,
    phi: Vec<f64>,
    d_phi: Vec<f64>,
}

impl Samples {
    fn new(grid: &Grid, fv: &FarFieldValues, sign: Sign) -> Self {
        let w = plateau();
        let z: Vec<f64> = grid.coordinates().iter().map(|x| (sign.value() * x + fv.zeta) / fv.lambda).collect();
        Samples { phi: z.iter().map(|&s| w.derivative(s, 0)).collect(), d_phi: z.iter().map(|&s| w.derivative(s, 1)).collect(), z }
    }
}

pub fn farfield_mass(grid: &Grid, b: &FieldBundle, fv: &FarFieldValues, sign: Sign) -> f64 {
    let s = Samples::new(grid, fv, sign);
    grid.quadrature_with(|j| s.phi[j] * b.density[j])
}

/// dM±/dt. The flux term is ±(2ω/λ)∫Φ' Im(conj(ψ)ψ_x); it is printed with 2
/// in place of 2ω.
pub fn farfield_mass_rhs(grid: &Grid, params: &ModelParams, b: &FieldBundle, fv: &FarFieldValues, sign: Sign) -> Breakdown {
    let s = Samples::new(grid, fv, sign);
    let l = fv.lambda;
    let scale = grid.quadrature_with(|j| s.d_phi[j] * s.z[j] * b.density[j]);
    let shift = grid.quadrature_with(|j| s.d_phi[j] * b.density[j]);
    // Im(conj(ψ)ψ_x) = −Im(ψ conj(ψ_x))
    let flux = -grid.quadrature_with(|j| s.d_phi[j] * b.momentum_density(j));
    let sg = sign.value();
    Breakdown {
        terms: vec![
            Term::same("scale", -fv.d_lambda / l * scale),
            Term::same("shift", fv.d_zeta / l * shift),
            Term::new("flux", sg * 2.0 * params.omega / l * flux, sg * 2.0 / l * flux),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarFieldEnergy {
    pub e1: f64,
    pub e2: f64,
    pub total: f64,
}

pub fn farfield_energy(grid: &Grid, params: &ModelParams, b: &FieldBundle, fv: &FarFieldValues, sign: Sign) -> FarFieldEnergy {
    let q = params.derived().q;
    let s = Samples::new(grid, fv, sign);
    let e1 = grid.quadrature_with(|j| s.phi[j] * b.dispersive_energy_density(params, q, j));
    let e2 = grid.quadrature_with(|j| s.phi[j] * b.acoustic_energy_density(params, j));
    FarFieldEnergy { e1, e2, total: e1 + e2 }
}

/// dE±/dt split into the four window terms (`window_*`) and the eight flux
/// terms `r1`..`r8`.
///
/// Printed coefficients that differ from the derived ones: r2 carries 4γqω
/// (derived 2γqω), r5 carries γ(β + α/2)/θ (derived γ(β + α²/2)/θ), r7
/// carries +γ²α/θ (derived −γ²α/(2θ)) and r8 carries γω/2 (derived γω).
pub fn farfield_energy_rhs(grid: &Grid, params: &ModelParams, b: &FieldBundle, fv: &FarFieldValues, sign: Sign) -> Breakdown {
    let p = params;
    let q = p.derived().q;
    let s = Samples::new(grid, fv, sign);
    let quad = |f: &dyn Fn(usize) -> f64| grid.quadrature_with(f);
    let l = fv.lambda;
    let shift = fv.d_zeta / l;
    let scale = -fv.d_lambda / l;
    let e1 = |j: usize| b.dispersive_energy_density(p, q, j);
    let e2 = |j: usize| b.acoustic_energy_density(p, j);

    let flux_psi = quad(&|j| s.d_phi[j] * (b.psi_x[j].conj() * b.psi_xx[j]).im);
    let cur = |j: usize| -b.momentum_density(j);
    let quartic_current = quad(&|j| s.d_phi[j] * b.density[j] * cur(j));
    let sq = quad(&|j| s.d_phi[j] * (p.beta * b.rho[j].powi(2) + b.eta[j].powi(2)));
    let rho_eta = quad(&|j| s.d_phi[j] * b.rho[j] * b.eta[j]);
    let rho_s = quad(&|j| s.d_phi[j] * b.rho[j] * b.density[j]);
    let eta_s = quad(&|j| s.d_phi[j] * b.eta[j] * b.density[j]);
    let s2 = quad(&|j| s.d_phi[j] * b.density[j].powi(2));
    let mixed_current = quad(&|j| s.d_phi[j] * (2.0 * b.eta[j] - p.alpha * b.rho[j]) * cur(j));

    let f = sign.value() / l;
    let (w, g, a, th, be) = (p.omega, p.gamma, p.alpha, p.theta, p.beta);
    Breakdown {
        terms: vec![
            Term::same("window_e1_shift", shift * quad(&|j| s.d_phi[j] * e1(j))),
            Term::same("window_e1_scale", scale * quad(&|j| s.d_phi[j] * s.z[j] * e1(j))),
            Term::same("window_e2_shift", shift * quad(&|j| s.d_phi[j] * e2(j))),
            Term::same("window_e2_scale", scale * quad(&|j| s.d_phi[j] * s.z[j] * e2(j))),
            Term::same("r1", f * 2.0 * w * w * flux_psi),
            Term::new("r2", f * 2.0 * g * q * w * quartic_current, f * 4.0 * g * q * w * quartic_current),
            Term::same("r3", -f * a / th * sq),
            Term::same("r4", f * (be + a * a) / th * rho_eta),
            Term::new("r5", f * g * (be + 0.5 * a * a) / th * rho_s, f * g * (be + 0.5 * a) / th * rho_s),
            Term::same("r6", -f * 1.5 * g * a / th * eta_s),
            Term::new("r7", -f * 0.5 * g * g * a / th * s2, f * g * g * a / th * s2),
            Term::new("r8", f * g * w * mixed_current, f * 0.5 * g * w * mixed_current),
        ],
    }
}
