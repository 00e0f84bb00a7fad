//! Physical parameters of the ZR/BR system and their derived constants.
//!
//! The system evolved by this crate is
//!
//! ```text
//! i ψ_t + ω ψ_xx          = γ (η − ½αρ + q|ψ|²) ψ
//! θ ρ_t + (η − αρ)_x      = −γ (|ψ|²)_x
//! θ η_t + (βρ − αη)_x     = ½αγ (|ψ|²)_x
//! ```
//!
//! with ω, β, γ > 0, β − α² > 0 and 0 < θ < 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of β − α² the soliton denominators are badly conditioned.
const CONDITIONING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
}

/// Admissible range for θ.
///
/// `Relaxed` accepts any θ > 0 and exists only for analytic test fixtures
/// (integer characteristic speeds and the like). It is off-model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaRange {
    #[default]
    Strict,
    Relaxed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Cubic self-interaction coefficient.
    pub q: f64,
    /// −(√β − α)/θ
    pub upsilon_minus: f64,
    /// (√β + α)/θ
    pub upsilon_plus: f64,
    /// Speed of w₊ = √βρ + η, equal to (√β − α)/θ.
    pub s_plus: f64,
    /// Speed of w₋ = √βρ − η, equal to −(√β + α)/θ.
    pub s_minus: f64,
}

impl ModelParams {
    pub fn new(omega: f64, alpha: f64, beta: f64, gamma: f64, theta: f64) -> Result<Self> {
        validate_params(ModelParams { omega, alpha, beta, gamma, theta })
    }

    pub fn sqrt_beta(&self) -> f64 {
        self.beta.sqrt()
    }

    pub fn derived(&self) -> DerivedConstants {
        derive_constants(self)
    }

    /// Largest acoustic characteristic speed, max(|s₊|, |s₋|).
    pub fn max_speed(&self) -> f64 {
        let d = self.derived();
        d.s_plus.abs().max(d.s_minus.abs())
    }
}

/// Checks the standing sign assumptions, reporting the first violated one.
pub fn validate_params(p: ModelParams) -> Result<ModelParams> {
    validate_params_with(p, ThetaRange::Strict)
}

pub fn validate_params_with(p: ModelParams, range: ThetaRange) -> Result<ModelParams> {
    let all = [p.omega, p.alpha, p.beta, p.gamma, p.theta];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("parameters must be finite".into()));
    }
    if p.omega <= 0.0 {
        return Err(Error::InvalidParams("omega ≤ 0".into()));
    }
    if p.beta <= 0.0 {
        return Err(Error::InvalidParams("beta ≤ 0".into()));
    }
    if p.gamma <= 0.0 {
        return Err(Error::InvalidParams("gamma ≤ 0".into()));
    }
    match range {
        ThetaRange::Strict if !(p.theta > 0.0 && p.theta < 1.0) => {
            return Err(Error::InvalidParams("theta not in (0,1)".into()));
        }
        ThetaRange::Relaxed if p.theta <= 0.0 => {
            return Err(Error::InvalidParams("theta ≤ 0".into()));
        }
        _ => {}
    }
    let gap = p.beta - p.alpha * p.alpha;
    if gap <= 0.0 {
        return Err(Error::InvalidParams("beta − alpha² ≤ 0".into()));
    }
    if gap < CONDITIONING_FLOOR {
        log::warn!("beta − alpha² = {gap:.3e} is nearly degenerate; soliton coefficients are ill-conditioned");
    }
    Ok(p)
}

pub fn derive_constants(p: &ModelParams) -> DerivedConstants {
    let gap = p.beta - p.alpha * p.alpha;
    let q = p.gamma + p.alpha * (p.alpha * p.gamma - 1.0) / (2.0 * gap);
    let sb = p.beta.sqrt();
    let upsilon_minus = -(sb - p.alpha) / p.theta;
    let upsilon_plus = (sb + p.alpha) / p.theta;
    DerivedConstants {
        q,
        upsilon_minus,
        upsilon_plus,
        s_plus: (sb - p.alpha) / p.theta,
        s_minus: -(sb + p.alpha) / p.theta,
    }
}
