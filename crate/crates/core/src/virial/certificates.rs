//! Positivity of the quadratic (ρ, η) forms met in the momentum and far-field
//! arguments.

use serde::Serialize;

use super::scaling::ScalingValues;
use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlphaBranch {
    /// α > 0, cross coefficient +(√β − 2α).
    Positive,
    /// α < 0, cross coefficient −(√β + 2α).
    Negative,
}

impl AlphaBranch {
    pub fn of(alpha: f64) -> Option<Self> {
        if alpha > 0.0 {
            Some(AlphaBranch::Positive)
        } else if alpha < 0.0 {
            Some(AlphaBranch::Negative)
        } else {
            None
        }
    }
}

/// Both sides of
/// ```text
/// ½∫η²Φ' + (β/2)∫ρ²Φ' + B∫ρηΦ'  ≥  c_η∫η²Φ' + c_ρ∫ρ²Φ'
/// ```
/// all divided by μλ₁, with Φ' = sech²(x/λ₁) and ε = ½(1 + β/B²).
///
/// The valid constants are c_η = ½(1 − 1/ε), c_ρ = ½(β − B²ε); the margin is
/// then ½∫(η/√ε + B√ε ρ)²Φ'/(μλ₁) ≥ 0. The `printed_*` fields use the two
/// constants exchanged, which is not a valid bound in general.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    pub branch: AlphaBranch,
    pub cross_coefficient: f64,
    pub epsilon: f64,
    pub lhs: f64,
    pub eta_coefficient: f64,
    pub rho_coefficient: f64,
    pub rhs: f64,
    pub margin: f64,
    pub printed_eta_coefficient: f64,
    pub printed_rho_coefficient: f64,
    pub printed_margin: f64,
    /// 10⁻¹⁰ times the η and ρ constants, in the printed assignment.
    pub epsilon_star: (f64, f64),
}

pub fn positivity_certificate(
    grid: &Grid,
    params: &ModelParams,
    state: &SimState,
    sv: &ScalingValues,
    branch: AlphaBranch,
) -> Result<PositivityReport> {
    if AlphaBranch::of(params.alpha) != Some(branch) {
        return Err(Error::BranchMismatch);
    }
    let sb = params.sqrt_beta();
    let cross = match branch {
        AlphaBranch::Positive => sb - 2.0 * params.alpha,
        AlphaBranch::Negative => -(sb + 2.0 * params.alpha),
    };
    let (epsilon, c_eta, c_rho) = if cross == 0.0 {
        (f64::INFINITY, 0.5, 0.5 * params.beta)
    } else {
        let e = 0.5 * (1.0 + params.beta / (cross * cross));
        (e, 0.5 * (1.0 - 1.0 / e), 0.5 * (params.beta - cross * cross * e))
    };
    let scale = 1.0 / (sv.mu * sv.lambda1);
    let weight: Vec<f64> = grid.coordinates().iter().map(|x| (x / sv.lambda1).cosh().powi(-2)).collect();
    let ee = scale * grid.quadrature_with(|j| state.eta[j].powi(2) * weight[j]);
    let rr = scale * grid.quadrature_with(|j| state.rho[j].powi(2) * weight[j]);
    let re = scale * grid.quadrature_with(|j| state.rho[j] * state.eta[j] * weight[j]);
    let lhs = 0.5 * ee + 0.5 * params.beta * rr + cross * re;
    let rhs = c_eta * ee + c_rho * rr;
    let printed_rhs = c_rho * ee + c_eta * rr;
    Ok(PositivityReport {
        branch,
        cross_coefficient: cross,
        epsilon,
        lhs,
        eta_coefficient: c_eta,
        rho_coefficient: c_rho,
        rhs,
        margin: lhs - rhs,
        printed_eta_coefficient: c_rho,
        printed_rho_coefficient: c_eta,
        printed_margin: lhs - printed_rhs,
        epsilon_star: (1e-10 * c_rho, 1e-10 * c_eta),
    })
}

/// Lower bound for the acoustic energy density including its coupling to |ψ|²:
/// ```text
/// ∫(β/2)ρ² + ½η² − αρη + (γ/2)(2η − αρ)|ψ|²  ≥  a_ρ‖ρ‖² + a_η‖η‖² − K‖ψ‖⁴_{L⁴}
/// ```
/// `rhs` uses a_ρ = 3(β−α²)/16, a_η = 7β/(16(β+α²)) and
/// K = γ²(β+α²)/(8β) + 2α²γ²/(β−α²), as printed; that choice fails once α²/β
/// is moderately large. `corrected_rhs` uses a_ρ = (β−α²)/8,
/// a_η = (β−α²)/(4(β+α²)), K = γ²(β+α²)/(β−α²) + γ²α²/(2(β−α²)), which holds
/// for every admissible parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinorantReport {
    pub lhs: f64,
    pub rhs: f64,
    pub corrected_rhs: f64,
    pub k: f64,
    pub corrected_k: f64,
}

impl MinorantReport {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn corrected_margin(&self) -> f64 {
        self.lhs - self.corrected_rhs
    }
}

pub fn quadratic_form_minorant(grid: &Grid, params: &ModelParams, state: &SimState) -> MinorantReport {
    let (a, b, g) = (params.alpha, params.beta, params.gamma);
    let gap = b - a * a;
    let s = state.density();
    let rr = grid.quadrature_with(|j| state.rho[j].powi(2));
    let ee = grid.quadrature_with(|j| state.eta[j].powi(2));
    let ss = grid.quadrature_with(|j| s[j] * s[j]);
    let lhs = grid.quadrature_with(|j| {
        let (r, e) = (state.rho[j], state.eta[j]);
        0.5 * b * r * r + 0.5 * e * e - a * r * e + 0.5 * g * (2.0 * e - a * r) * s[j]
    });
    let k = g * g * (b + a * a) / (8.0 * b) + 2.0 * a * a * g * g / gap;
    // Q ≥ m_ρρ² + m_ηη² exactly, then Young on each coupling term with half of
    // the corresponding coefficient.
    let m_rho = 0.25 * gap;
    let m_eta = gap / (2.0 * (b + a * a));
    let corrected_k = g * g / (2.0 * m_eta) + g * g * a * a / (8.0 * m_rho);
    MinorantReport {
        lhs,
        rhs: 3.0 * gap / 16.0 * rr + 7.0 * b / (16.0 * (b + a * a)) * ee - k * ss,
        corrected_rhs: 0.5 * m_rho * rr + 0.5 * m_eta * ee - corrected_k * ss,
        k,
        corrected_k,
    }
}
