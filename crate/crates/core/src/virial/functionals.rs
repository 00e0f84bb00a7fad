//! Modified momentum functional I, its characteristic-adapted versions Ĩ±,
//! and the mean functionals J₁, J₂ of the Riemann variables.
//!
//! ```text
//! I  = (1/μ) Im∫ψ conj(ψ_x) Φ(x/λ₁) − (θ/μ) ∫ρη Φ(x/λ₁)
//! J₁ = (θ/μ) ∫ w₊(x − υ₋t) Φ(x/λ₁) Φ'(x/λ₂)
//! J₂ = (θ/μ) ∫ w₋(x − υ₊t) Φ(x/λ₁) Φ'(x/λ₂)
//! ```
//!
//! with Φ = tanh. `virial_rhs_i` and `virial_rhs_i_tilde` return −d/dt of
//! their functional, `virial_rhs_j` returns +dJ/dt.

use serde::Serialize;

use super::scaling::ScalingValues;
use super::weights::WeightFamily;
use super::{Breakdown, Sign, Term};
use crate::diagnostics::FieldBundle;
use crate::grid::{Grid, SimState};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// w₊ = √βρ + η sampled along x − υ₋t.
    One,
    /// w₋ = √βρ − η sampled along x − υ₊t.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IParts {
    pub i1: f64,
    pub i2: f64,
    pub total: f64,
}

/// A state and its two characteristic translates, with derivatives cached.
#[derive(Debug, Clone)]
pub struct VirialFrame {
    pub t: f64,
    pub base: FieldBundle,
    /// Fields sampled at x − υ₋t.
    pub minus: FieldBundle,
    /// Fields sampled at x − υ₊t.
    pub plus: FieldBundle,
}

impl VirialFrame {
    pub fn new(grid: &Grid, params: &ModelParams, state: &SimState) -> Self {
        let d = params.derived();
        VirialFrame {
            t: state.t,
            base: FieldBundle::new(grid, state),
            minus: FieldBundle::new(grid, &state.shifted(grid, d.upsilon_minus * state.t)),
            plus: FieldBundle::new(grid, &state.shifted(grid, d.upsilon_plus * state.t)),
        }
    }

    pub fn along(&self, sign: Sign) -> &FieldBundle {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }
}

/// Values of Φ, Φ', Φ''' at x/λ for every node.
struct TanhSamples {
    scaled: Vec<f64>,
    phi: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl TanhSamples {
    fn new(grid: &Grid, lambda: f64) -> Self {
        let w = WeightFamily::tanh_core();
        let scaled: Vec<f64> = grid.coordinates().iter().map(|x| x / lambda).collect();
        TanhSamples {
            phi: scaled.iter().map(|&s| w.derivative(s, 0)).collect(),
            d1: scaled.iter().map(|&s| w.derivative(s, 1)).collect(),
            d2: scaled.iter().map(|&s| w.derivative(s, 2)).collect(),
            d3: scaled.iter().map(|&s| w.derivative(s, 3)).collect(),
            scaled,
        }
    }
}

fn i_parts(grid: &Grid, params: &ModelParams, b: &FieldBundle, sv: &ScalingValues) -> IParts {
    let w = TanhSamples::new(grid, sv.lambda1);
    let i1 = grid.quadrature_with(|j| b.momentum_density(j) * w.phi[j]) / sv.mu;
    let i2 = params.theta * grid.quadrature_with(|j| b.rho[j] * b.eta[j] * w.phi[j]) / sv.mu;
    IParts { i1, i2, total: i1 - i2 }
}

pub fn functional_i(grid: &Grid, params: &ModelParams, b: &FieldBundle, sv: &ScalingValues) -> IParts {
    i_parts(grid, params, b, sv)
}

/// Ĩ± = I evaluated on the fields sampled at x − υ±t.
pub fn functional_i_tilde(grid: &Grid, params: &ModelParams, frame: &VirialFrame, sv: &ScalingValues, sign: Sign) -> f64 {
    i_parts(grid, params, frame.along(sign), sv).total
}

/// −dI/dt.
///
/// The printed form differs from the derived one in three coefficients: the
/// quartic term carries 3γq/4 instead of γq/2, and the two ρη transport terms
/// (μ' and λ₁') lack the factor θ.
pub fn virial_rhs_i(grid: &Grid, params: &ModelParams, b: &FieldBundle, sv: &ScalingValues) -> Breakdown {
    let p = params;
    let q = p.derived().q;
    let w = TanhSamples::new(grid, sv.lambda1);
    let (mu, l1) = (sv.mu, sv.lambda1);
    let ml = mu * l1;
    let quad = |f: &dyn Fn(usize) -> f64| grid.quadrature_with(f);

    let psi_x2 = quad(&|j| b.psi_x[j].norm_sqr() * w.d1[j]);
    let s_d3 = quad(&|j| b.density[j] * w.d3[j]);
    let s2 = quad(&|j| b.density[j].powi(2) * w.d1[j]);
    let eta2 = quad(&|j| b.eta[j].powi(2) * w.d1[j]);
    let rho_eta = quad(&|j| b.rho[j] * b.eta[j] * w.d1[j]);
    let rho2 = quad(&|j| b.rho[j].powi(2) * w.d1[j]);
    let coupling = quad(&|j| (b.eta[j] - 0.5 * p.alpha * b.rho[j]) * b.density[j] * w.d1[j]);
    let mom_phi = quad(&|j| b.momentum_density(j) * w.phi[j]);
    let rho_eta_phi = quad(&|j| b.rho[j] * b.eta[j] * w.phi[j]);
    let mom_x = quad(&|j| w.scaled[j] * b.momentum_density(j) * w.d1[j]);
    let rho_eta_x = quad(&|j| w.scaled[j] * b.rho[j] * b.eta[j] * w.d1[j]);

    let mu_rate = sv.d_mu / (mu * mu);
    let l_rate = sv.d_lambda1 / ml;
    Breakdown {
        terms: vec![
            Term::same("dispersion", 2.0 * p.omega / ml * psi_x2),
            Term::same("third_derivative", -p.omega / (2.0 * mu * l1.powi(3)) * s_d3),
            Term::new("quartic", p.gamma * q / (2.0 * ml) * s2, 3.0 * p.gamma * q / (4.0 * ml) * s2),
            Term::same("eta_squared", eta2 / (2.0 * ml)),
            Term::same("rho_eta", -p.alpha / ml * rho_eta),
            Term::same("rho_squared", p.beta / (2.0 * ml) * rho2),
            Term::same("coupling", p.gamma / ml * coupling),
            Term::same("mu_momentum", mu_rate * mom_phi),
            Term::new("mu_rho_eta", -p.theta * mu_rate * rho_eta_phi, -mu_rate * rho_eta_phi),
            Term::same("lambda_momentum", l_rate * mom_x),
            Term::new("lambda_rho_eta", -p.theta * l_rate * rho_eta_x, -l_rate * rho_eta_x),
        ],
    }
}

/// −dĨ±/dt: the I right-hand side on the translated fields plus the two
/// transport terms produced by the moving frame,
/// −(υ±/(μλ₁))[Im∫ψ conj(ψ_x) Φ' − θ∫ρηΦ'].
///
/// The printed transport terms are ±(√β±α)/(μλ₁)·Im∫ψ conj(ψ_x)Φ' ∓ (√β±α)/(μλ₁)·∫ρηΦ',
/// i.e. the opposite sign with θ misplaced.
pub fn virial_rhs_i_tilde(grid: &Grid, params: &ModelParams, frame: &VirialFrame, sv: &ScalingValues, sign: Sign) -> Breakdown {
    let b = frame.along(sign);
    let mut out = virial_rhs_i(grid, params, b, sv);
    let d = params.derived();
    let speed = match sign {
        Sign::Plus => d.upsilon_plus,
        Sign::Minus => d.upsilon_minus,
    };
    let w = TanhSamples::new(grid, sv.lambda1);
    let ml = sv.mu * sv.lambda1;
    let mom = grid.quadrature_with(|j| b.momentum_density(j) * w.d1[j]);
    let rho_eta = grid.quadrature_with(|j| b.rho[j] * b.eta[j] * w.d1[j]);
    let th = params.theta;
    // θυ± = ±(√β ± α)
    out.push(Term::new("frame_momentum", -speed / ml * mom, th * speed / ml * mom));
    out.push(Term::new("frame_rho_eta", th * speed / ml * rho_eta, -th * speed / ml * rho_eta));
    out
}

struct JSamples {
    x1: Vec<f64>,
    x2: Vec<f64>,
    phi1: Vec<f64>,
    d_phi1: Vec<f64>,
    d_phi2: Vec<f64>,
    dd_phi2: Vec<f64>,
}

impl JSamples {
    fn new(grid: &Grid, sv: &ScalingValues) -> Self {
        let a = TanhSamples::new(grid, sv.lambda1);
        let b = TanhSamples::new(grid, sv.lambda2);
        JSamples { x1: a.scaled, x2: b.scaled, phi1: a.phi, d_phi1: a.d1, d_phi2: b.d1, dd_phi2: b.d2 }
    }
}

fn riemann(params: &ModelParams, b: &FieldBundle, which: Branch) -> Vec<f64> {
    let sb = params.sqrt_beta();
    b.rho
        .iter()
        .zip(&b.eta)
        .map(|(r, e)| match which {
            Branch::One => sb * r + e,
            Branch::Two => sb * r - e,
        })
        .collect()
}

fn branch_bundle(frame: &VirialFrame, branch: Branch) -> &FieldBundle {
    match branch {
        Branch::One => &frame.minus,
        Branch::Two => &frame.plus,
    }
}

pub fn functional_j(grid: &Grid, params: &ModelParams, frame: &VirialFrame, sv: &ScalingValues, branch: Branch) -> f64 {
    let b = branch_bundle(frame, branch);
    let w = riemann(params, b, branch);
    let s = JSamples::new(grid, sv);
    params.theta / sv.mu * grid.quadrature_with(|j| w[j] * s.phi1[j] * s.d_phi2[j])
}

/// dJ/dt.
///
/// Derived forcing prefactors are γ(√β − α/2) for J₁ and γ(√β + α/2) for J₂;
/// the printed ones are γ(2√β − α) and γ(√β − α). The printed transport terms
/// of J₁ also use √βρ − η in place of √βρ + η.
pub fn virial_rhs_j(grid: &Grid, params: &ModelParams, frame: &VirialFrame, sv: &ScalingValues, branch: Branch) -> Breakdown {
    let b = branch_bundle(frame, branch);
    let p = params;
    let sb = p.sqrt_beta();
    let w = riemann(p, b, branch);
    let w_printed = riemann(p, b, Branch::Two);
    let (forcing, forcing_printed) = match branch {
        Branch::One => (p.gamma * (sb - 0.5 * p.alpha), p.gamma * (2.0 * sb - p.alpha)),
        Branch::Two => (p.gamma * (sb + 0.5 * p.alpha), p.gamma * (sb - p.alpha)),
    };
    let s = JSamples::new(grid, sv);
    let quad = |f: &dyn Fn(usize) -> f64| grid.quadrature_with(f);
    let f1 = quad(&|j| b.density[j] * s.d_phi1[j] * s.d_phi2[j]);
    let f2 = quad(&|j| b.density[j] * s.phi1[j] * s.dd_phi2[j]);
    let transport = |field: &[f64]| {
        (
            quad(&|j| field[j] * s.phi1[j] * s.d_phi2[j]),
            quad(&|j| s.x1[j] * field[j] * s.d_phi1[j] * s.d_phi2[j]),
            quad(&|j| s.x2[j] * field[j] * s.phi1[j] * s.dd_phi2[j]),
        )
    };
    let (t0, t1, t2) = transport(&w);
    let (p0, p1, p2) = transport(&w_printed);
    let th = p.theta;
    let (mu, l1, l2) = (sv.mu, sv.lambda1, sv.lambda2);
    let c_mu = -th * sv.d_mu / (mu * mu);
    let c_l1 = -th * sv.d_lambda1 / (mu * l1);
    let c_l2 = -th * sv.d_lambda2 / (mu * l2);
    Breakdown {
        terms: vec![
            Term::new("forcing_lambda1", forcing / (mu * l1) * f1, forcing_printed / (mu * l1) * f1),
            Term::new("forcing_lambda2", forcing / (mu * l2) * f2, forcing_printed / (mu * l2) * f2),
            Term::new("mu_transport", c_mu * t0, c_mu * p0),
            Term::new("lambda1_transport", c_l1 * t1, c_l1 * p1),
            Term::new("lambda2_transport", c_l2 * t2, c_l2 * p2),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SplitStepper;
    use crate::virial::scaling::{ScalingSet, DYNAMIC_KAPPA};
    use num_complex::Complex64;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 0.3, 1.2, 0.9, 0.5).unwrap()
    }

    fn psi_fn(x: f64) -> Complex64 {
        Complex64::from_polar(0.7 * (-(x - 0.5) * (x - 0.5) / 3.0).exp(), 0.4 * x)
    }

    fn dpsi_fn(x: f64) -> Complex64 {
        psi_fn(x) * Complex64::new(-2.0 * (x - 0.5) / 3.0, 0.4)
    }

    fn rho_fn(x: f64) -> f64 {
        0.3 * (-(x + 1.0) * (x + 1.0) / 2.0).exp()
    }

    fn eta_fn(x: f64) -> f64 {
        -0.25 * (-(x - 1.5) * (x - 1.5)).exp() * (1.0 + 0.3 * x)
    }

    fn generic(grid: &Grid, t: f64) -> SimState {
        let mut s = SimState::from_fn(grid, psi_fn, rho_fn, eta_fn);
        s.t = t;
        s
    }

    #[test]
    fn zero_state_gives_zero() {
        let g = Grid::new(20.0, 128).unwrap();
        let p = params();
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(1.0);
        let frame = VirialFrame::new(&g, &p, &SimState::zeros(&g));
        assert_eq!(functional_i(&g, &p, &frame.base, &sv).total, 0.0);
        assert_eq!(virial_rhs_i(&g, &p, &frame.base, &sv).derived_total(), 0.0);
        for b in [Branch::One, Branch::Two] {
            assert_eq!(functional_j(&g, &p, &frame, &sv, b), 0.0);
            assert_eq!(virial_rhs_j(&g, &p, &frame, &sv, b).derived_total(), 0.0);
        }
        for s in [Sign::Plus, Sign::Minus] {
            assert_eq!(functional_i_tilde(&g, &p, &frame, &sv, s), 0.0);
            assert_eq!(virial_rhs_i_tilde(&g, &p, &frame, &sv, s).derived_total(), 0.0);
        }
    }

    #[test]
    fn even_real_psi_has_no_momentum_part() {
        let g = Grid::new(20.0, 256).unwrap();
        let p = params();
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(0.0);
        let s = SimState::from_fn(&g, |x| Complex64::new((-x * x).exp(), 0.0), |_| 0.0, |_| 0.0);
        let b = FieldBundle::new(&g, &s);
        assert!(functional_i(&g, &p, &b, &sv).total.abs() < 1e-12);
    }

    #[test]
    fn i_matches_refined_analytic_quadrature() {
        let g = Grid::new(20.0, 512).unwrap();
        let p = params();
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(2.0);
        let b = FieldBundle::new(&g, &generic(&g, 2.0));
        let value = functional_i(&g, &p, &b, &sv).total;
        let fine = Grid::new(20.0, 2048).unwrap();
        let oracle = fine.quadrature_with(|j| {
            let x = fine.x(j);
            let phi = (x / sv.lambda1).tanh();
            ((psi_fn(x) * dpsi_fn(x).conj()).im - p.theta * rho_fn(x) * eta_fn(x)) * phi / sv.mu
        });
        assert!((value - oracle).abs() < 1e-8, "{value} vs {oracle}");
    }

    #[test]
    fn j_vanishes_by_parity_at_time_zero() {
        let g = Grid::new(20.0, 256).unwrap();
        let p = params();
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(0.0);
        let s = SimState::from_fn(&g, |_| Complex64::new(0.0, 0.0), |x| (-x * x).exp(), |x| 0.5 * (-x * x / 2.0).exp());
        let frame = VirialFrame::new(&g, &p, &s);
        assert!(functional_j(&g, &p, &frame, &sv, Branch::One).abs() < 1e-12);
        assert!(functional_j(&g, &p, &frame, &sv, Branch::Two).abs() < 1e-12);
    }

    #[test]
    fn j_matches_directly_sampled_translate() {
        let g = Grid::new(30.0, 512).unwrap();
        let p = params();
        let t = 1.3;
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(t);
        let frame = VirialFrame::new(&g, &p, &generic(&g, t));
        let d = p.derived();
        let sb = p.sqrt_beta();
        let fine = Grid::new(30.0, 2048).unwrap();
        for (branch, speed, sgn) in [(Branch::One, d.upsilon_minus, 1.0), (Branch::Two, d.upsilon_plus, -1.0)] {
            let oracle = p.theta / sv.mu
                * fine.quadrature_with(|j| {
                    let x = fine.x(j);
                    let y = x - speed * t;
                    (sb * rho_fn(y) + sgn * eta_fn(y)) * (x / sv.lambda1).tanh() / (x / sv.lambda2).cosh().powi(2)
                });
            let value = functional_j(&g, &p, &frame, &sv, branch);
            assert!((value - oracle).abs() < 1e-8, "{branch:?}: {value} vs {oracle}");
        }
    }

    #[test]
    fn i_tilde_equals_i_at_time_zero() {
        let g = Grid::new(20.0, 256).unwrap();
        let p = params();
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(0.0);
        let frame = VirialFrame::new(&g, &p, &generic(&g, 0.0));
        let i = functional_i(&g, &p, &frame.base, &sv).total;
        for s in [Sign::Plus, Sign::Minus] {
            assert!((functional_i_tilde(&g, &p, &frame, &sv, s) - i).abs() < 1e-13);
        }
    }

    #[test]
    fn pure_acoustic_j_has_only_transport_terms() {
        let g = Grid::new(20.0, 256).unwrap();
        let p = params();
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(1.0);
        let s = SimState::from_fn(&g, |_| Complex64::new(0.0, 0.0), rho_fn, eta_fn);
        let frame = VirialFrame::new(&g, &p, &s);
        for b in [Branch::One, Branch::Two] {
            let r = virial_rhs_j(&g, &p, &frame, &sv, b);
            assert_eq!(r.get("forcing_lambda1").unwrap().derived, 0.0);
            assert_eq!(r.get("forcing_lambda2").unwrap().derived, 0.0);
            assert!(r.get("mu_transport").unwrap().derived != 0.0);
        }
    }

    #[test]
    fn breakdown_sums_to_total() {
        let g = Grid::new(20.0, 256).unwrap();
        let p = params();
        let sv = ScalingSet::new(DYNAMIC_KAPPA).at(1.0);
        let frame = VirialFrame::new(&g, &p, &generic(&g, 1.0));
        let r = virial_rhs_i(&g, &p, &frame.base, &sv);
        let sum: f64 = r.terms.iter().map(|t| t.derived).sum();
        assert!((sum - r.derived_total()).abs() <= 1e-12 * sum.abs().max(1.0));
        assert_eq!(r.terms.len(), 11);
    }

    /// Centered time difference of each functional against its right-hand side
    /// along a short simulated trajectory.
    #[test]
    fn identities_hold_along_a_trajectory() {
        let g = Grid::new(40.0, 512).unwrap();
        let p = params();
        let dt = 1e-3;
        let scal = ScalingSet::new(DYNAMIC_KAPPA);
        let mut st = SplitStepper::new(p, g.clone(), dt).unwrap();
        let mut s = generic(&g, 0.0);
        st.advance(&mut s, 300).unwrap();
        let prev = s.clone();
        st.step(&mut s).unwrap();
        let mid = s.clone();
        st.step(&mut s).unwrap();
        let next = s;

        let frames: Vec<VirialFrame> = [&prev, &mid, &next].iter().map(|x| VirialFrame::new(&g, &p, x)).collect();
        let svs: Vec<ScalingValues> = [&prev, &mid, &next].iter().map(|x| scal.at(x.t)).collect();
        let fd = |f: &dyn Fn(&VirialFrame, &ScalingValues) -> f64| (f(&frames[2], &svs[2]) - f(&frames[0], &svs[0])) / (2.0 * dt);
        let check = |name: &str, fd_rate: f64, rhs: f64| {
            let rel = (fd_rate - rhs).abs() / rhs.abs().max(1e-300);
            assert!(rel < 1e-4, "{name}: fd {fd_rate:.10e} rhs {rhs:.10e} rel {rel:.2e}");
        };
        let i_rate = -fd(&|fr, sv| functional_i(&g, &p, &fr.base, sv).total);
        check("I", i_rate, virial_rhs_i(&g, &p, &frames[1].base, &svs[1]).derived_total());
        for b in [Branch::One, Branch::Two] {
            let rate = fd(&|fr, sv| functional_j(&g, &p, fr, sv, b));
            check("J", rate, virial_rhs_j(&g, &p, &frames[1], &svs[1], b).derived_total());
        }
        for sign in [Sign::Plus, Sign::Minus] {
            let rate = -fd(&|fr, sv| functional_i_tilde(&g, &p, fr, sv, sign));
            check("Itilde", rate, virial_rhs_i_tilde(&g, &p, &frames[1], &svs[1], sign).derived_total());
        }
    }
}
