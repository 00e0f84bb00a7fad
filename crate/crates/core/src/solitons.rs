//! Travelling solitary waves and the adiabatic (θ → 0) reference dynamics.
//!
//! Substituting ψ = e^{iλt}e^{icx/(2ω)}R(x − ct), ρ = A|R|², η = B|R|² into the
//! acoustic equations forces
//!
//! ```text
//! A = −γ(cθ + α/2)/(β − (cθ+α)²)          = b(c)
//! B = −γ(β − (α/2)(cθ + α))/(β − (cθ+α)²) = a(c)
//! ```
//!
//! so the density carries b(c) and the potential carries a(c). The profile
//! then solves ωR'' = σR + gR³ with σ = λ + c²/(4ω) and
//! g = γ(a(c) − (α/2)b(c) + q), whose decaying solution is
//! R = √(2σ/|g|)·sech(√(σ/ω)·x) whenever σ > 0 and g < 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};
use crate::model::ModelParams;

const DENOMINATOR_FLOOR: f64 = 1e-10;
const RESIDUAL_GATE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonCoefficients {
    pub a: f64,
    pub b: f64,
    /// a(c) − (α/2)b(c) + q < 0
    pub flag1: bool,
    /// b(c) − (α/2)a(c) + q < 0, the combination obtained when ρ carries a(c).
    pub flag1_swapped: bool,
}

pub fn soliton_coefficients(p: &ModelParams, c: f64) -> Result<SolitonCoefficients> {
    let m = c * p.theta + p.alpha;
    let den = p.beta - m * m;
    if den.abs() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateSoliton(den));
    }
    let a = -p.gamma * (p.beta - 0.5 * p.alpha * m) / den;
    let b = -p.gamma * (c * p.theta + 0.5 * p.alpha) / den;
    let q = p.derived().q;
    Ok(SolitonCoefficients {
        a,
        b,
        flag1: a - 0.5 * p.alpha * b + q < 0.0,
        flag1_swapped: b - 0.5 * p.alpha * a + q < 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonParams {
    pub c: f64,
    pub lambda_freq: f64,
    pub a_of_c: f64,
    pub b_of_c: f64,
    /// g in ωR'' = σR + gR³.
    pub nonlinear_coeff: f64,
    /// λ + c²/(4ω), the decay rate squared times ω.
    pub sigma: f64,
    /// λ − c²/(4ω); positive exactly when the second existence flag holds.
    pub sigma_printed: f64,
    pub flag1: bool,
    pub flag1_swapped: bool,
    pub flag2: bool,
}

impl SolitonParams {
    pub fn new(p: &ModelParams, c: f64, lambda_freq: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite() && lambda_freq.is_finite()) {
            return Err(Error::InvalidParams(format!("soliton speed {c} and frequency {lambda_freq}")));
        }
        let k = soliton_coefficients(p, c)?;
        let shift = c * c / (4.0 * p.omega);
        Ok(SolitonParams {
            c,
            lambda_freq,
            a_of_c: k.a,
            b_of_c: k.b,
            nonlinear_coeff: p.gamma * (k.a - 0.5 * p.alpha * k.b + p.derived().q),
            sigma: lambda_freq + shift,
            sigma_printed: lambda_freq - shift,
            flag1: k.flag1,
            flag1_swapped: k.flag1_swapped,
            flag2: shift - lambda_freq < 0.0,
        })
    }

    pub fn amplitude(&self) -> f64 {
        (2.0 * self.sigma / self.nonlinear_coeff.abs()).sqrt()
    }

    pub fn width_rate(&self, omega: f64) -> f64 {
        (self.sigma / omega).sqrt()
    }

    pub fn profile(&self, omega: f64, y: f64) -> f64 {
        self.amplitude() / (self.width_rate(omega) * y).cosh()
    }
}

/// Max-norm residuals of the three equations under the travelling ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonResidual {
    pub psi: f64,
    pub rho: f64,
    pub eta: f64,
}

impl SolitonResidual {
    pub fn max(&self) -> f64 {
        self.psi.max(self.rho).max(self.eta)
    }
}

/// Solitary wave at t = 0 centred at the origin.
pub fn build_soliton_state(p: &ModelParams, c: f64, lambda_freq: f64, grid: &Grid) -> Result<(SimState, SolitonResidual)> {
    let sp = SolitonParams::new(p, c, lambda_freq)?;
    if !sp.flag1 {
        return Err(Error::SolitonRefused(format!(
            "a(c) − (α/2)b(c) + q = {:.6e} is not negative",
            sp.nonlinear_coeff / p.gamma
        )));
    }
    if !sp.flag2 {
        return Err(Error::SolitonRefused(format!("c²/(4ω) − λ = {:.6e} is not negative", -sp.sigma_printed)));
    }
    let profile: Vec<f64> = (0..grid.n_points()).map(|j| sp.profile(p.omega, grid.x(j))).collect();
    let k = c / (2.0 * p.omega);
    let mut state = SimState::zeros(grid);
    for j in 0..grid.n_points() {
        let s = profile[j] * profile[j];
        state.psi[j] = Complex64::from_polar(profile[j], k * grid.x(j));
        state.rho[j] = sp.b_of_c * s;
        state.eta[j] = sp.a_of_c * s;
    }
    let residual = soliton_residual(p, &sp, grid, &state, &profile);
    if residual.max() > RESIDUAL_GATE {
        return Err(Error::SolitonResidual(residual.max()));
    }
    Ok((state, residual))
}

/// Substitutes the ansatz into the equations with spectral x-derivatives and
/// the time derivatives implied by travelling at speed c.
fn soliton_residual(p: &ModelParams, sp: &SolitonParams, grid: &Grid, state: &SimState, profile: &[f64]) -> SolitonResidual {
    let c = sp.c;
    let q = p.derived().q;
    let k = c / (2.0 * p.omega);
    let r_x = grid.spectral_derivative_real(profile, 1);
    let psi_xx = grid.spectral_derivative(&state.psi, 2);
    let s = state.density();
    let s_x = grid.spectral_derivative_real(&s, 1);
    let rho_x = grid.spectral_derivative_real(&state.rho, 1);
    let eta_x = grid.spectral_derivative_real(&state.eta, 1);
    let mut out = SolitonResidual { psi: 0.0, rho: 0.0, eta: 0.0 };
    for j in 0..grid.n_points() {
        let carrier = Complex64::from_polar(1.0, k * grid.x(j));
        // ψ_t = iλψ − c·carrier·R'
        let psi_t = Complex64::i() * sp.lambda_freq * state.psi[j] - c * carrier * r_x[j];
        let v = p.gamma * (state.eta[j] - 0.5 * p.alpha * state.rho[j] + q * s[j]);
        let res_psi = Complex64::i() * psi_t + p.omega * psi_xx[j] - v * state.psi[j];
        let rho_t = -c * rho_x[j];
        let eta_t = -c * eta_x[j];
        let res_rho = p.theta * rho_t + (eta_x[j] - p.alpha * rho_x[j]) + p.gamma * s_x[j];
        let res_eta = p.theta * eta_t + (p.beta * rho_x[j] - p.alpha * eta_x[j]) - 0.5 * p.alpha * p.gamma * s_x[j];
        out.psi = out.psi.max(res_psi.norm());
        out.rho = out.rho.max(res_rho.abs());
        out.eta = out.eta.max(res_eta.abs());
    }
    out
}

/// First moment ∫x|ψ|² / ∫|ψ|².
pub fn center_of_mass(grid: &Grid, state: &SimState) -> f64 {
    let m = grid.quadrature_with(|j| state.psi[j].norm_sqr());
    if m == 0.0 {
        return 0.0;
    }
    grid.quadrature_with(|j| grid.x(j) * state.psi[j].norm_sqr()) / m
}

/// Relative L² distance between `evolved` and `reference` after translating
/// the reference by `shift` and rotating it by the best global phase.
pub fn shape_error(grid: &Grid, reference: &[Complex64], evolved: &[Complex64], shift: f64) -> f64 {
    let moved = grid.shift(reference, shift);
    let overlap: Complex64 = moved.iter().zip(evolved).map(|(a, b)| a.conj() * b).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    let diff = grid.quadrature_with(|j| (evolved[j] - phase * moved[j]).norm_sqr());
    let norm = grid.quadrature_with(|j| reference[j].norm_sqr());
    if norm == 0.0 {
        diff.sqrt()
    } else {
        (diff / norm).sqrt()
    }
}

/// Coefficients of the θ → 0 reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticCoefficients {
    /// ρ = rho·|ψ|²
    pub rho: f64,
    /// η = eta·|ψ|²
    pub eta: f64,
    /// γ(eta − (α/2)rho + q), obtained by substituting the slaved fields.
    pub g_eff: f64,
    /// −γα/(3(β − α²)), the value usually quoted for the limit equation.
    pub g_eff_printed: f64,
}

pub fn adiabatic_coefficients(p: &ModelParams) -> AdiabaticCoefficients {
    let gap = p.beta - p.alpha * p.alpha;
    let rho = -p.gamma * p.alpha / (2.0 * gap);
    let eta = -p.gamma * (p.beta - 0.5 * p.alpha * p.alpha) / gap;
    AdiabaticCoefficients {
        rho,
        eta,
        g_eff: p.gamma * (eta - 0.5 * p.alpha * rho + p.derived().q),
        g_eff_printed: -p.gamma * p.alpha / (3.0 * gap),
    }
}

/// Acoustic fields slaved to |ψ|².
pub fn adiabatic_slaved_state(psi: &[Complex64], p: &ModelParams) -> (Vec<f64>, Vec<f64>) {
    let k = adiabatic_coefficients(p);
    psi.iter().map(|z| (k.rho * z.norm_sqr(), k.eta * z.norm_sqr())).unzip()
}

/// One Strang step N(τ/2) F(τ) N(τ/2) of iψ_t + ωψ_xx = g_eff|ψ|²ψ.
pub fn nls_reference_step(grid: &Grid, omega: f64, psi: &mut [Complex64], tau: f64, g_eff: f64) {
    let rotate = |psi: &mut [Complex64], h: f64| {
        for z in psi.iter_mut() {
            *z *= Complex64::from_polar(1.0, -g_eff * z.norm_sqr() * h);
        }
    };
    rotate(psi, 0.5 * tau);
    grid.fft_in_place(psi);
    for (z, k) in psi.iter_mut().zip(grid.wavenumbers()) {
        *z *= Complex64::from_polar(1.0, -omega * k * k * tau);
    }
    grid.ifft_in_place(psi);
    rotate(psi, 0.5 * tau);
}
