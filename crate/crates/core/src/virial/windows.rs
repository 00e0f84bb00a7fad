//! Sharp spatial windows and the integrals of local densities over them.

use log::debug;
use serde::{Deserialize, Serialize};

use super::scaling::{FarFieldScaling, ScalingSet};
use crate::diagnostics::FieldBundle;
use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};

/// Growth law of a far-field distance ζ(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaLaw {
    /// (1 + t)·log^{1+δ}(e + t)
    LogPower { delta: f64 },
    /// (1 + t)^{2+δ}
    Power { delta: f64 },
}

impl ZetaLaw {
    pub fn at(self, t: f64) -> f64 {
        match self {
            ZetaLaw::LogPower { delta } => (1.0 + t) * (std::f64::consts::E + t).ln().powf(1.0 + delta),
            ZetaLaw::Power { delta } => (1.0 + t).powf(2.0 + delta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// |x − v·t| ≤ c·λ(t), with λ the window scaling of [`ScalingSet`].
    OmegaPm { c: f64, center_speed: f64 },
    /// c·λ(t) ≤ |x| ≤ C·λ(t).
    Omega0 { c: f64, big_c: f64 },
    /// c₁·ζ(t) ≤ |x| ≤ c₂·ζ(t).
    OmegaZeta { c1: f64, c2: f64, zeta: ZetaLaw },
    /// λ/10 + ζ ≤ |x| ≤ 9λ/10 + ζ for the far-field λ, ζ.
    OmegaFfr { scaling: FarFieldScaling },
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Window::OmegaPm { c, center_speed } => c > 0.0 && center_speed.is_finite(),
            Window::Omega0 { c, big_c } => c >= 0.0 && c < big_c,
            Window::OmegaZeta { c1, c2, .. } => c1 >= 0.0 && c1 < c2,
            Window::OmegaFfr { scaling } => scaling.delta > 0.0 && scaling.zeta_factor >= 0.0 && scaling.lambda_scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("inconsistent window {self:?}")))
        }
    }

    /// Closed intervals [a, b] covered by the window at time t.
    pub fn intervals(&self, t: f64, scalings: &ScalingSet) -> Vec<(f64, f64)> {
        let annulus = |lo: f64, hi: f64| vec![(-hi, -lo), (lo, hi)];
        match *self {
            Window::OmegaPm { c, center_speed } => {
                let (mid, half) = (center_speed * t, c * scalings.window_lambda(t));
                vec![(mid - half, mid + half)]
            }
            Window::Omega0 { c, big_c } => {
                let l = scalings.window_lambda(t);
                annulus(c * l, big_c * l)
            }
            Window::OmegaZeta { c1, c2, zeta } => {
                let z = zeta.at(t);
                annulus(c1 * z, c2 * z)
            }
            Window::OmegaFfr { scaling } => {
                let (l, z) = (scaling.lambda(t), scaling.zeta(t));
                annulus(0.1 * l + z, 0.9 * l + z)
            }
        }
    }

    /// Name used for CSV columns and reports.
    pub fn label(&self) -> String {
        match *self {
            Window::OmegaPm { c, center_speed } => format!("omega_pm(c={c},v={center_speed:.6})"),
            Window::Omega0 { c, big_c } => format!("omega_0(c={c},C={big_c})"),
            Window::OmegaZeta { c1, c2, zeta } => match zeta {
                ZetaLaw::LogPower { delta } => format!("omega_zeta_log(c1={c1},c2={c2},d={delta})"),
                ZetaLaw::Power { delta } => format!("omega_zeta_pow(c1={c1},c2={c2},d={delta})"),
            },
            Window::OmegaFfr { .. } => "omega_ffr".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    /// |ψ|²
    Mass,
    /// |ψ_x|² + |ψ|² + ρ² + η²
    Full,
    /// |ψ_x|² + |ψ|⁴ + ρ² + η²
    FullQuartic,
}

impl Density {
    pub fn label(self) -> &'static str {
        match self {
            Density::Mass => "mass",
            Density::Full => "full",
            Density::FullQuartic => "full_quartic",
        }
    }
}

/// ∫ over the window of the chosen density, using a node mask.
pub fn window_norm(grid: &Grid, state: &SimState, window: &Window, density: Density, scalings: &ScalingSet) -> Result<f64> {
    window.validate()?;
    let intervals = window.intervals(state.t, scalings);
    let l = grid.half_length();
    if intervals.iter().all(|&(a, b)| b < -l || a > l) {
        debug!("window {} lies outside the box [−{l}, {l}) at t = {}; wrap-around would be needed", window.label(), state.t);
        return Ok(0.0);
    }
    let inside = |x: f64| intervals.iter().any(|&(a, b)| a <= x && x <= b);
    let mask: Vec<bool> = (0..grid.n_points()).map(|j| inside(grid.x(j))).collect();
    if !mask.iter().any(|&m| m) {
        return Ok(0.0);
    }
    Ok(match density {
        Density::Mass => grid.quadrature_with(|j| if mask[j] { state.psi[j].norm_sqr() } else { 0.0 }),
        Density::Full | Density::FullQuartic => {
            let b = FieldBundle::new(grid, state);
            grid.quadrature_with(|j| {
                if !mask[j] {
                    return 0.0;
                }
                let s = b.density[j];
                let psi_part = if density == Density::Full { s } else { s * s };
                b.psi_x[j].norm_sqr() + psi_part + b.rho[j].powi(2) + b.eta[j].powi(2)
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::virial::scaling::DYNAMIC_KAPPA;
    use num_complex::Complex64;

    fn bump(g: &Grid) -> SimState {
        SimState::from_fn(g, |x| Complex64::new((-x * x / 4.0).exp(), 0.0), |x| 0.1 * (-x * x).exp(), |_| 0.0)
    }

    #[test]
    fn whole_box_window_gives_mass() {
        let g = Grid::new(20.0, 256).unwrap();
        let s = bump(&g);
        let w = Window::OmegaPm { c: 1e6, center_speed: 0.0 };
        let mut st = s.clone();
        st.t = 1.0;
        let v = window_norm(&g, &st, &w, Density::Mass, &ScalingSet::new(DYNAMIC_KAPPA)).unwrap();
        assert!((v - crate::diagnostics::mass(&g, &s)).abs() < 1e-12);
    }

    #[test]
    fn window_outside_box_is_zero() {
        let g = Grid::new(20.0, 256).unwrap();
        let mut s = bump(&g);
        s.t = 1.0;
        let w = Window::OmegaPm { c: 0.1, center_speed: 1000.0 };
        assert_eq!(window_norm(&g, &s, &w, Density::Full, &ScalingSet::new(DYNAMIC_KAPPA)).unwrap(), 0.0);
    }

    #[test]
    fn annulus_matches_masked_sum() {
        let g = Grid::new(20.0, 256).unwrap();
        let mut s = bump(&g);
        s.t = 3.0;
        let sc = ScalingSet::new(DYNAMIC_KAPPA);
        let w = Window::Omega0 { c: 0.5, big_c: 2.0 };
        let l = sc.window_lambda(3.0);
        let mut oracle = 0.0;
        for j in 0..g.n_points() {
            let x = g.x(j);
            if x.abs() >= 0.5 * l && x.abs() <= 2.0 * l {
                oracle += (-x * x / 2.0).exp() * g.dx();
            }
        }
        let v = window_norm(&g, &s, &w, Density::Mass, &sc).unwrap();
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn inconsistent_windows_are_rejected() {
        let g = Grid::new(20.0, 64).unwrap();
        let s = SimState::zeros(&g);
        let sc = ScalingSet::new(DYNAMIC_KAPPA);
        assert!(window_norm(&g, &s, &Window::Omega0 { c: 2.0, big_c: 1.0 }, Density::Mass, &sc).is_err());
        let z = Window::OmegaZeta { c1: 3.0, c2: 3.0, zeta: ZetaLaw::Power { delta: 0.1 } };
        assert!(window_norm(&g, &s, &z, Density::Mass, &sc).is_err());
    }

    #[test]
    fn zeta_laws() {
        assert!((ZetaLaw::Power { delta: 0.1 }.at(1.0) - 2f64.powf(2.1)).abs() < 1e-12);
        assert!((ZetaLaw::LogPower { delta: 0.5 }.at(0.0) - 1.0).abs() < 1e-12);
    }
}
