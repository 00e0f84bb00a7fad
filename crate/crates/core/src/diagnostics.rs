//! Conserved quantities and norm monitors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::least_squares_slope;
use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};
use crate::model::ModelParams;

/// A state together with its spectral derivatives, computed once and shared
/// by every integrand evaluated on it.
#[derive(Debug, Clone)]
pub struct FieldBundle {
    pub psi: Vec<Complex64>,
    pub psi_x: Vec<Complex64>,
    pub psi_xx: Vec<Complex64>,
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
    pub density: Vec<f64>,
}

impl FieldBundle {
    pub fn new(grid: &Grid, state: &SimState) -> Self {
        let mut spectrum = grid.transform(&state.psi);
        let mut first = spectrum.clone();
        for (j, z) in first.iter_mut().enumerate() {
            *z *= grid.derivative_symbol(j, 1);
        }
        for (j, z) in spectrum.iter_mut().enumerate() {
            *z *= grid.derivative_symbol(j, 2);
        }
        grid.ifft_in_place(&mut first);
        grid.ifft_in_place(&mut spectrum);
        FieldBundle {
            psi: state.psi.clone(),
            psi_x: first,
            psi_xx: spectrum,
            rho: state.rho.clone(),
            eta: state.eta.clone(),
            density: state.density(),
        }
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// Im(ψ·conj(ψ_x)) at node j.
    pub fn momentum_density(&self, j: usize) -> f64 {
        (self.psi[j] * self.psi_x[j].conj()).im
    }

    /// ω|ψ_x|² + (γq/2)|ψ|⁴ at node j.
    pub fn dispersive_energy_density(&self, p: &ModelParams, q: f64, j: usize) -> f64 {
        p.omega * self.psi_x[j].norm_sqr() + 0.5 * p.gamma * q * self.density[j].powi(2)
    }

    /// (β/2)ρ² + ½η² + (γ/2)(2η − αρ)|ψ|² − αρη at node j.
    pub fn acoustic_energy_density(&self, p: &ModelParams, j: usize) -> f64 {
        let (r, e, s) = (self.rho[j], self.eta[j], self.density[j]);
        0.5 * p.beta * r * r + 0.5 * e * e + 0.5 * p.gamma * (2.0 * e - p.alpha * r) * s - p.alpha * r * e
    }

    /// |ψ_x|² + |ψ|² + ρ² + η² at node j.
    pub fn local_energy_density(&self, j: usize) -> f64 {
        self.psi_x[j].norm_sqr() + self.density[j] + self.rho[j].powi(2) + self.eta[j].powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedTriple {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

pub fn mass(grid: &Grid, state: &SimState) -> f64 {
    grid.quadrature_with(|j| state.psi[j].norm_sqr())
}

/// Im∫ψ·conj(ψ_x) − θ∫ρη.
pub fn momentum(grid: &Grid, params: &ModelParams, state: &SimState) -> f64 {
    momentum_of(grid, params, &FieldBundle::new(grid, state))
}

pub fn momentum_of(grid: &Grid, params: &ModelParams, b: &FieldBundle) -> f64 {
    grid.quadrature_with(|j| b.momentum_density(j) - params.theta * b.rho[j] * b.eta[j])
}

pub fn energy(grid: &Grid, params: &ModelParams, state: &SimState) -> f64 {
    energy_of(grid, params, &FieldBundle::new(grid, state))
}

pub fn energy_of(grid: &Grid, params: &ModelParams, b: &FieldBundle) -> f64 {
    let q = params.derived().q;
    grid.quadrature_with(|j| b.dispersive_energy_density(params, q, j) + b.acoustic_energy_density(params, j))
}

pub fn conserved(grid: &Grid, params: &ModelParams, state: &SimState) -> ConservedTriple {
    let b = FieldBundle::new(grid, state);
    ConservedTriple {
        mass: grid.quadrature(&b.density),
        momentum: momentum_of(grid, params, &b),
        energy: energy_of(grid, params, &b),
    }
}

/// |now − initial| / max(1, |initial|).
pub fn relative_drift(initial: f64, now: f64) -> f64 {
    (now - initial).abs() / initial.abs().max(1.0)
}

/// Quadratic part of the energy and two candidate minorants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoerciveBound {
    /// ∫(β/2)ρ² + ½η² − αρη
    pub quadratic: f64,
    /// (β−α²)/4·‖ρ‖² + β/(2(β+α²))·‖η‖², as printed in the literature.
    pub minorant: f64,
    /// (β−α²)/4·‖ρ‖² + (β−α²)/(2(β+α²))·‖η‖², the largest η coefficient that
    /// keeps the remainder positive semi-definite once the ρ coefficient is fixed.
    pub corrected_minorant: f64,
}

pub fn coercive_lower_bound(grid: &Grid, params: &ModelParams, state: &SimState) -> CoerciveBound {
    let (a, b) = (params.alpha, params.beta);
    let rr = grid.quadrature_with(|j| state.rho[j].powi(2));
    let ee = grid.quadrature_with(|j| state.eta[j].powi(2));
    let re = grid.quadrature_with(|j| state.rho[j] * state.eta[j]);
    let gap = b - a * a;
    CoerciveBound {
        quadratic: 0.5 * b * rr + 0.5 * ee - a * re,
        minorant: 0.25 * gap * rr + b / (2.0 * (b + a * a)) * ee,
        corrected_minorant: 0.25 * gap * rr + gap / (2.0 * (b + a * a)) * ee,
    }
}

/// Least-squares exponent p in ‖ψ(t)‖_{H²} ≈ C(1+t)^p.
pub fn h2_growth_exponent(times: &[f64], h2_norms: &[f64]) -> Result<f64> {
    if times.len() < 10 || times.len() != h2_norms.len() {
        return Err(Error::NotEnoughSamples(format!("H² fit needs ≥ 10 paired samples, got {}", times.len())));
    }
    if h2_norms.iter().any(|v| *v <= 0.0) {
        return Err(Error::NotEnoughSamples("H² norms must be positive".into()));
    }
    let xs: Vec<f64> = times.iter().map(|t| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = h2_norms.iter().map(|v| v.ln()).collect();
    Ok(least_squares_slope(&xs, &ys))
}

pub fn h2_growth_monitor(grid: &Grid, states: &[SimState]) -> Result<f64> {
    let times: Vec<f64> = states.iter().map(|s| s.t).collect();
    let norms: Vec<f64> = states.iter().map(|s| grid.h_s_norm(&s.psi, 2.0)).collect();
    h2_growth_exponent(&times, &norms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SplitStepper;
    use rand::{Rng, SeedableRng};

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    fn params(alpha: f64) -> ModelParams {
        ModelParams::new(1.0, alpha, 1.0, 1.0, 0.5).unwrap()
    }

    fn generic(grid: &Grid) -> SimState {
        SimState::from_fn(
            grid,
            |x| Complex64::from_polar(sech(x), 0.7 * x),
            |x| 0.4 * (-(x - 1.0f64).powi(2)).exp(),
            |x| 0.3 * sech(x + 0.5),
        )
    }

    #[test]
    fn mass_examples() {
        let g = Grid::new(30.0, 1024).unwrap();
        let s = SimState::from_fn(&g, |x| Complex64::new(sech(x), 0.0), |_| 0.0, |_| 0.0);
        assert!((mass(&g, &s) - 2.0).abs() < 1e-10);
        assert_eq!(mass(&g, &SimState::zeros(&g)), 0.0);
        let mut doubled = s.clone();
        doubled.psi.iter_mut().for_each(|z| *z *= 2.0);
        assert!((mass(&g, &doubled) - 4.0 * mass(&g, &s)).abs() < 1e-12);
    }

    #[test]
    fn momentum_examples() {
        let g = Grid::new(30.0, 1024).unwrap();
        let p = params(0.0);
        let real = SimState::from_fn(&g, |x| Complex64::new(sech(x), 0.0), |_| 0.0, |_| 0.0);
        assert!(momentum(&g, &p, &real).abs() < 1e-14);
        let acoustic = SimState::from_fn(&g, |_| Complex64::new(0.0, 0.0), sech, sech);
        assert!((momentum(&g, &p, &acoustic) + 0.5 * 2.0).abs() < 1e-10);
        // ρη = sech⁴ gives the 4/3 integral.
        let squared = SimState::from_fn(&g, |_| Complex64::new(0.0, 0.0), |x| sech(x).powi(2), |x| sech(x).powi(2));
        assert!((momentum(&g, &p, &squared) + 0.5 * 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn momentum_matches_fourth_order_difference() {
        let g = Grid::new(20.0, 2048).unwrap();
        let p = params(0.2);
        let k = 1.3;
        let f = |x: f64| Complex64::from_polar((-x * x / 2.0).exp(), k * x);
        let s = SimState::from_fn(&g, f, |_| 0.0, |_| 0.0);
        let h = 1e-3;
        let oracle = g.quadrature_with(|j| {
            let x = g.x(j);
            let d = (-f(x + 2.0 * h) + f(x + h) * 8.0 - f(x - h) * 8.0 + f(x - 2.0 * h)) / (12.0 * h);
            (f(x) * d.conj()).im
        });
        assert!((momentum(&g, &p, &s) - oracle).abs() < 1e-8);
    }

    #[test]
    fn energy_examples() {
        let g = Grid::new(30.0, 1024).unwrap();
        let p = ModelParams::new(1.0, 0.4, 1.5, 1.0, 0.5).unwrap();
        assert_eq!(energy(&g, &p, &SimState::zeros(&g)), 0.0);
        let s = SimState::from_fn(&g, |_| Complex64::new(0.0, 0.0), sech, sech);
        let ff = 2.0;
        let expected = 0.5 * (p.beta + 1.0) * ff - p.alpha * ff;
        assert!((energy(&g, &p, &s) - expected).abs() < 1e-10);
    }

    #[test]
    fn coercive_examples() {
        let g = Grid::new(30.0, 1024).unwrap();
        let p = params(0.0);
        let zero = coercive_lower_bound(&g, &p, &SimState::zeros(&g));
        assert_eq!((zero.quadratic, zero.minorant), (0.0, 0.0));
        let s = SimState::from_fn(&g, |_| Complex64::new(0.0, 0.0), sech, sech);
        let c = coercive_lower_bound(&g, &p, &s);
        assert!((c.quadratic - 2.0).abs() < 1e-10);
        assert!((c.minorant - 0.75 * 2.0).abs() < 1e-10);
        assert!(c.quadratic >= c.minorant);
    }

    #[test]
    fn printed_minorant_fails_for_aligned_fields() {
        // ρ = η = f with α = 0.9, β = 1: the quadratic part is 0.1∫f² while the
        // printed minorant is ≈0.3∫f², so the printed η coefficient is too large.
        let g = Grid::new(30.0, 512).unwrap();
        let p = ModelParams::new(1.0, 0.9, 1.0, 1.0, 0.5).unwrap();
        let s = SimState::from_fn(&g, |_| Complex64::new(0.0, 0.0), sech, sech);
        let c = coercive_lower_bound(&g, &p, &s);
        assert!(c.quadratic < c.minorant);
        assert!(c.quadratic >= c.corrected_minorant);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(100))]
        #[test]
        fn corrected_minorant_holds(seed in 0u64..u64::MAX, frac in -0.99f64..0.99, beta in 0.2f64..4.0) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = Grid::new(10.0, 64).unwrap();
            let p = ModelParams::new(1.0, frac * beta.sqrt(), beta, 1.0, 0.5).unwrap();
            let coeffs: Vec<(f64, f64, f64, f64)> = (0..4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.5..2.0))).collect();
            let s = SimState::from_fn(
                &g,
                |_| Complex64::new(0.0, 0.0),
                |x| coeffs.iter().map(|(a, _, c, w)| a * (-(x - c).powi(2) / w).exp()).sum(),
                |x| coeffs.iter().map(|(_, b, c, w)| b * (-(x - c).powi(2) / w).exp()).sum(),
            );
            let c = coercive_lower_bound(&g, &p, &s);
            proptest::prop_assert!(c.quadratic >= c.corrected_minorant - 1e-12);
        }

        #[test]
        fn conserved_invariant_under_roll_and_phase(cells in 0usize..256, phi in -3.0f64..3.0) {
            let g = Grid::new(20.0, 256).unwrap();
            let p = params(0.3);
            let s = generic(&g);
            let base = conserved(&g, &p, &s);
            let rolled = conserved(&g, &p, &s.rolled(cells));
            let mut rotated = s.clone();
            rotated.psi.iter_mut().for_each(|z| *z *= Complex64::from_polar(1.0, phi));
            let rot = conserved(&g, &p, &rotated);
            for other in [rolled, rot] {
                proptest::prop_assert!((other.mass - base.mass).abs() < 1e-12);
                proptest::prop_assert!((other.momentum - base.momentum).abs() < 1e-12);
                proptest::prop_assert!((other.energy - base.energy).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn drift_is_relative_to_at_least_one() {
        assert_eq!(relative_drift(0.0, 1e-3), 1e-3);
        assert_eq!(relative_drift(10.0, 11.0), 0.1);
    }

    #[test]
    fn h2_exponent_of_free_flow_is_flat() {
        let g = Grid::new(40.0, 512).unwrap();
        let p = params(0.0);
        let mut st = SplitStepper::new(p, g.clone(), 0.05).unwrap().with_gamma_zero(true);
        let mut s = SimState::from_fn(&g, |x| Complex64::from_polar((-x * x).exp(), 0.5 * x), |_| 0.0, |_| 0.0);
        let mut states = vec![s.clone()];
        for _ in 0..12 {
            st.advance(&mut s, 10).unwrap();
            states.push(s.clone());
        }
        let exponent = h2_growth_monitor(&g, &states).unwrap();
        assert!(exponent.abs() < 0.05, "{exponent}");
        assert!(h2_growth_monitor(&g, &states[..5]).is_err());
    }

    #[test]
    fn h2_exponent_recovers_power_law() {
        let times: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let norms: Vec<f64> = times.iter().map(|t| 3.0 * (1.0 + t).powf(0.7)).collect();
        assert!((h2_growth_exponent(&times, &norms).unwrap() - 0.7).abs() < 1e-12);
    }
}
