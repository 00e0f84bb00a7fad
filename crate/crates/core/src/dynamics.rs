//! Split-step time integration with exact sub-flows.
//!
//! The right-hand side splits into three flows, each solved exactly:
//!
//! * free Schrödinger, diagonal in Fourier space,
//! * potential rotation ψ ↦ e^{−iVτ}ψ with V frozen (|ψ| is invariant under it),
//! * forced acoustic transport with |ψ|² frozen, diagonalised by the Riemann
//!   variables w± = √β ρ ± η.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{l2_norm, l2_norm_complex, Grid, SimState};
use crate::model::{DerivedConstants, ModelParams};

/// Growth factor of any field norm that is treated as a blow-up.
const INSTABILITY_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Lie,
    #[default]
    Strang,
}

/// Riemann variables of the acoustic pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannPair {
    pub w_plus: Vec<f64>,
    pub w_minus: Vec<f64>,
}

impl RiemannPair {
    pub fn from_fields(rho: &[f64], eta: &[f64], sqrt_beta: f64) -> Self {
        RiemannPair {
            w_plus: rho.iter().zip(eta).map(|(r, e)| sqrt_beta * r + e).collect(),
            w_minus: rho.iter().zip(eta).map(|(r, e)| sqrt_beta * r - e).collect(),
        }
    }

    /// Inverse map: ρ = (w₊ + w₋)/(2√β), η = (w₊ − w₋)/2.
    pub fn to_fields(&self, sqrt_beta: f64) -> (Vec<f64>, Vec<f64>) {
        let rho = self.w_plus.iter().zip(&self.w_minus).map(|(p, m)| (p + m) / (2.0 * sqrt_beta)).collect();
        let eta = self.w_plus.iter().zip(&self.w_minus).map(|(p, m)| 0.5 * (p - m)).collect();
        (rho, eta)
    }
}

/// Transport speed and forcing strength of one Riemann variable.
///
/// θ∂t w₊ + a₊∂x w₊ = −g₊∂x S and θ∂t w₋ − a₋∂x w₋ = −g₋∂x S.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticCoefficients {
    pub a_plus: f64,
    pub g_plus: f64,
    pub a_minus: f64,
    pub g_minus: f64,
}

impl AcousticCoefficients {
    pub fn new(p: &ModelParams) -> Self {
        let sb = p.sqrt_beta();
        AcousticCoefficients {
            a_plus: sb - p.alpha,
            g_plus: p.gamma * (sb - 0.5 * p.alpha),
            a_minus: sb + p.alpha,
            g_minus: p.gamma * (sb + 0.5 * p.alpha),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitStepper {
    params: ModelParams,
    derived: DerivedConstants,
    grid: Grid,
    dt: f64,
    scheme: Scheme,
    gamma_zero: bool,
    dealias: Vec<bool>,
    free_phase: Vec<Complex64>,
    acoustic_tau: f64,
    acoustic_plus: Vec<Complex64>,
    acoustic_minus: Vec<Complex64>,
    reference: Option<[f64; 3]>,
}

/// Default time step 0.5·dx / max|s±|.
pub fn default_dt(params: &ModelParams, grid: &Grid) -> f64 {
    0.5 * grid.dx() / params.max_speed()
}

impl SplitStepper {
    pub fn new(params: ModelParams, grid: Grid, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::Config(format!("dt must be finite and non-zero, got {dt}")));
        }
        let mut s = SplitStepper {
            derived: params.derived(),
            params,
            dealias: grid.dealias_mask(),
            grid,
            dt,
            scheme: Scheme::Strang,
            gamma_zero: false,
            free_phase: Vec::new(),
            acoustic_tau: 0.0,
            acoustic_plus: Vec::new(),
            acoustic_minus: Vec::new(),
            reference: None,
        };
        s.rebuild_tables();
        Ok(s)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self.rebuild_tables();
        self
    }

    /// Switches off the acoustic forcing and the cubic self-interaction. The
    /// (η, ρ) potential seen by ψ is kept, so the problem is linear but the
    /// splitting is still non-trivial.
    pub fn with_gamma_zero(mut self, on: bool) -> Self {
        self.gamma_zero = on;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self.reference = None;
        self.rebuild_tables();
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn derived(&self) -> &DerivedConstants {
        &self.derived
    }

    pub fn gamma_zero(&self) -> bool {
        self.gamma_zero
    }

    fn rebuild_tables(&mut self) {
        self.free_phase = self.free_phases(self.dt);
        self.acoustic_tau = match self.scheme {
            Scheme::Strang => 0.5 * self.dt,
            Scheme::Lie => self.dt,
        };
        let (p, m) = self.acoustic_phases(self.acoustic_tau);
        self.acoustic_plus = p;
        self.acoustic_minus = m;
    }

    fn free_phases(&self, tau: f64) -> Vec<Complex64> {
        let omega = self.params.omega;
        self.grid
            .wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0, -omega * k * k * tau))
            .collect()
    }

    /// Phase factors e^{−ik sτ} for both Riemann speeds; Nyquist uses the real part.
    fn acoustic_phases(&self, tau: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let ny = self.grid.nyquist_index();
        let make = |speed: f64| -> Vec<Complex64> {
            self.grid
                .wavenumbers()
                .iter()
                .enumerate()
                .map(|(j, k)| {
                    let phase = -k * speed * tau;
                    if j == ny {
                        Complex64::new(phase.cos(), 0.0)
                    } else {
                        Complex64::from_polar(1.0, phase)
                    }
                })
                .collect()
        };
        (make(self.derived.s_plus), make(self.derived.s_minus))
    }

    /// ψ̂_k ← e^{−iωk²τ} ψ̂_k.
    pub fn substep_schrodinger_free(&self, state: &mut SimState, tau: f64) {
        let phases = self.free_phases(tau);
        self.apply_free(state, &phases);
    }

    fn apply_free(&self, state: &mut SimState, phases: &[Complex64]) {
        self.grid.fft_in_place(&mut state.psi);
        for (z, p) in state.psi.iter_mut().zip(phases) {
            *z *= p;
        }
        self.grid.ifft_in_place(&mut state.psi);
    }

    /// Potential V = γ(η − ½αρ) + γq·S, with S dealiased in the cubic term.
    pub fn potential(&self, state: &SimState) -> Vec<f64> {
        let p = &self.params;
        let mut v: Vec<f64> = state
            .eta
            .iter()
            .zip(&state.rho)
            .map(|(e, r)| p.gamma * (e - 0.5 * p.alpha * r))
            .collect();
        if !self.gamma_zero {
            let s = self.dealiased_density(state);
            let c = p.gamma * self.derived.q;
            v.iter_mut().zip(&s).for_each(|(vj, sj)| *vj += c * sj);
        }
        v
    }

    fn dealiased_density(&self, state: &SimState) -> Vec<f64> {
        let mut buf: Vec<Complex64> = state.psi.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        self.grid.fft_in_place(&mut buf);
        for (z, keep) in buf.iter_mut().zip(&self.dealias) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        self.grid.ifft_in_place(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// ψ ← e^{−iVτ}ψ pointwise.
    pub fn substep_potential(&self, state: &mut SimState, tau: f64) {
        let v = self.potential(state);
        for (z, vj) in state.psi.iter_mut().zip(&v) {
            *z *= Complex64::from_polar(1.0, -vj * tau);
        }
    }

    /// Exact acoustic flow over τ with |ψ|² frozen.
    pub fn substep_acoustic(&self, state: &mut SimState, tau: f64) {
        let (p, m) = self.acoustic_phases(tau);
        self.apply_acoustic(state, &p, &m);
    }

    fn apply_acoustic(&self, state: &mut SimState, phase_plus: &[Complex64], phase_minus: &[Complex64]) {
        let n = self.grid.n_points();
        let sb = self.params.sqrt_beta();
        let coeffs = AcousticCoefficients::new(&self.params);
        let (c_plus, c_minus) = if self.gamma_zero {
            (0.0, 0.0)
        } else {
            (coeffs.g_plus / coeffs.a_plus, coeffs.g_minus / coeffs.a_minus)
        };
        let density: Vec<f64> = state.psi.iter().map(|z| z.norm_sqr()).collect();

        #[cfg(debug_assertions)]
        let means_before = (state.rho.iter().sum::<f64>(), state.eta.iter().sum::<f64>());

        // u₊ = w₊ + (g₊/a₊)S and u₋ = w₋ − (g₋/a₋)S are transported rigidly;
        // pack both real fields into one complex transform.
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| {
                let wp = sb * state.rho[j] + state.eta[j];
                let wm = sb * state.rho[j] - state.eta[j];
                Complex64::new(wp + c_plus * density[j], wm - c_minus * density[j])
            })
            .collect();
        self.grid.fft_in_place(&mut buf);
        let packed = buf.clone();
        for j in 0..n {
            let mirror = packed[(n - j) % n].conj();
            let up = 0.5 * (packed[j] + mirror);
            let um = Complex64::new(0.0, -0.5) * (packed[j] - mirror);
            buf[j] = up * phase_plus[j] + Complex64::new(0.0, 1.0) * (um * phase_minus[j]);
        }
        self.grid.ifft_in_place(&mut buf);
        for j in 0..n {
            let wp = buf[j].re - c_plus * density[j];
            let wm = buf[j].im + c_minus * density[j];
            state.rho[j] = (wp + wm) / (2.0 * sb);
            state.eta[j] = 0.5 * (wp - wm);
        }

        #[cfg(debug_assertions)]
        {
            let (r0, e0) = means_before;
            let (r1, e1) = (state.rho.iter().sum::<f64>(), state.eta.iter().sum::<f64>());
            let scale = 1.0 + r0.abs() + e0.abs() + density.iter().sum::<f64>();
            debug_assert!((r1 - r0).abs() <= 1e-9 * scale && (e1 - e0).abs() <= 1e-9 * scale, "acoustic substep moved the zero mode");
        }
    }

    /// Captures the norms against which blow-up is judged.
    pub fn set_reference(&mut self, state: &SimState) {
        self.reference = Some(field_norms(&self.grid, state));
    }

    /// Advances by one step of size dt.
    pub fn step(&mut self, state: &mut SimState) -> Result<()> {
        if self.reference.is_none() {
            self.set_reference(state);
        }
        match self.scheme {
            Scheme::Strang => {
                let h = 0.5 * self.dt;
                let (ap, am) = (std::mem::take(&mut self.acoustic_plus), std::mem::take(&mut self.acoustic_minus));
                self.apply_acoustic(state, &ap, &am);
                self.substep_potential(state, h);
                let free = std::mem::take(&mut self.free_phase);
                self.apply_free(state, &free);
                self.free_phase = free;
                self.substep_potential(state, h);
                self.apply_acoustic(state, &ap, &am);
                self.acoustic_plus = ap;
                self.acoustic_minus = am;
            }
            Scheme::Lie => {
                let (ap, am) = (std::mem::take(&mut self.acoustic_plus), std::mem::take(&mut self.acoustic_minus));
                self.apply_acoustic(state, &ap, &am);
                self.acoustic_plus = ap;
                self.acoustic_minus = am;
                self.substep_potential(state, self.dt);
                let free = std::mem::take(&mut self.free_phase);
                self.apply_free(state, &free);
                self.free_phase = free;
            }
        }
        state.t += self.dt;
        self.check_stability(state)
    }

    pub fn advance(&mut self, state: &mut SimState, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(state)?;
        }
        Ok(())
    }

    fn check_stability(&self, state: &SimState) -> Result<()> {
        let reference = self.reference.unwrap_or([0.0; 3]);
        let total: f64 = reference.iter().sum();
        let now = field_norms(&self.grid, state);
        for ((name, n), r) in ["psi", "rho", "eta"].into_iter().zip(now).zip(reference) {
            if !n.is_finite() || n > INSTABILITY_FACTOR * r.max(total) {
                return Err(Error::Instability { t: state.t, field: name, norm: n });
            }
        }
        Ok(())
    }
}

fn field_norms(grid: &Grid, state: &SimState) -> [f64; 3] {
    [l2_norm_complex(grid, &state.psi), l2_norm(grid, &state.rho), l2_norm(grid, &state.eta)]
}

fn steps_for(t_final: f64, dt: f64) -> Result<usize> {
    let steps = (t_final / dt).round();
    if steps < 1.0 || ((steps * dt) - t_final).abs() > 1e-9 * t_final.abs().max(1.0) {
        return Err(Error::Config(format!("T = {t_final} is not a positive multiple of dt = {dt}")));
    }
    Ok(steps as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub order: f64,
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub reference_dt: f64,
}

/// Least-squares slope of log error against log dt.
///
/// Errors are measured against a run at dt_min/16, far enough below the
/// finest listed step that the reference error does not bias the slope.
pub fn convergence_study(template: &SplitStepper, initial: &SimState, t_final: f64, dts: &[f64]) -> Result<ConvergenceReport> {
    if dts.len() < 3 {
        return Err(Error::NeedThreeResolutions);
    }
    if dts.windows(2).any(|w| !(w[1] < w[0])) || dts.iter().any(|d| *d <= 0.0) {
        return Err(Error::UnorderedResolutions);
    }
    let run = |dt: f64| -> Result<SimState> {
        let mut stepper = template.clone().with_dt(dt);
        let mut state = initial.clone();
        stepper.advance(&mut state, steps_for(t_final, dt)?)?;
        Ok(state)
    };
    let reference_dt = dts[dts.len() - 1] / 16.0;
    let reference = run(reference_dt)?;
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        errors.push(run(dt)?.l2_distance(&reference, template.grid()));
    }
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(ConvergenceReport { order: least_squares_slope(&xs, &ys), dts: dts.to_vec(), errors, reference_dt })
}

pub fn measure_convergence_order(template: &SplitStepper, initial: &SimState, t_final: f64, dts: &[f64]) -> Result<f64> {
    convergence_study(template, initial, t_final, dts).map(|r| r.order)
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params_with, ThetaRange};
    use std::f64::consts::PI;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 0.3, 1.0, 1.0, 0.5).unwrap()
    }

    fn bump_state(grid: &Grid) -> SimState {
        SimState::from_fn(
            grid,
            |x| Complex64::from_polar(0.8 * (-x * x / 4.0).exp(), 0.5 * x),
            |x| 0.3 * (-(x - 1.0f64).powi(2)).exp(),
            |x| -0.2 * (-(x + 0.5f64).powi(2) / 2.0).exp(),
        )
    }

    #[test]
    fn riemann_bijection_round_trip() {
        let g = Grid::new(10.0, 64).unwrap();
        let s = bump_state(&g);
        let sb = 1.7f64.sqrt();
        let (rho, eta) = RiemannPair::from_fields(&s.rho, &s.eta, sb).to_fields(sb);
        for j in 0..64 {
            assert!((rho[j] - s.rho[j]).abs() < 1e-14);
            assert!((eta[j] - s.eta[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn free_substep_plane_wave_and_reversibility() {
        let l = 5.0;
        let g = Grid::new(l, 64).unwrap();
        let k = 3.0 * PI / l;
        let st = SplitStepper::new(params(), g.clone(), 0.01).unwrap();
        let mut s = SimState::from_fn(&g, |x| Complex64::from_polar(1.0, k * x), |_| 0.0, |_| 0.0);
        let orig = s.clone();
        st.substep_schrodinger_free(&mut s, 0.37);
        for (j, z) in s.psi.iter().enumerate() {
            let exact = Complex64::from_polar(1.0, k * g.x(j) - k * k * 0.37);
            assert!((z - exact).norm() < 1e-12);
        }
        st.substep_schrodinger_free(&mut s, -0.37);
        assert!(s.l2_distance(&orig, &g) < 1e-12);
        let mut same = orig.clone();
        st.substep_schrodinger_free(&mut same, 0.0);
        assert!(same.l2_distance(&orig, &g) < 1e-14);
    }

    #[test]
    fn potential_substep_rotates_constant() {
        let g = Grid::new(5.0, 32).unwrap();
        let p = params();
        let st = SplitStepper::new(p, g.clone(), 0.01).unwrap();
        let a = 0.7;
        let mut s = SimState::from_fn(&g, |_| Complex64::new(a, 0.0), |_| 0.0, |_| 0.0);
        st.substep_potential(&mut s, 0.4);
        let expected = Complex64::from_polar(a, -p.gamma * p.derived().q * a * a * 0.4);
        assert!(s.psi.iter().all(|z| (z - expected).norm() < 1e-14));
    }

    #[test]
    fn potential_substep_preserves_mass() {
        let g = Grid::new(10.0, 128).unwrap();
        let st = SplitStepper::new(params(), g.clone(), 0.01).unwrap();
        let mut s = bump_state(&g);
        let m0 = g.quadrature(&s.density());
        st.substep_potential(&mut s, 0.3);
        assert!((g.quadrature(&s.density()) - m0).abs() < 1e-14 * m0.max(1.0));
        let before = s.clone();
        st.substep_potential(&mut s, 0.0);
        assert_eq!(s, before);
    }

    #[test]
    fn acoustic_substep_trivial_cases() {
        let g = Grid::new(10.0, 64).unwrap();
        let st = SplitStepper::new(params(), g.clone(), 0.01).unwrap();
        let mut zero = SimState::zeros(&g);
        st.substep_acoustic(&mut zero, 0.5);
        assert!(zero.l2_distance(&SimState::zeros(&g), &g) == 0.0);
        let mut s = bump_state(&g);
        let orig = s.clone();
        st.substep_acoustic(&mut s, 0.0);
        assert!(s.l2_distance(&orig, &g) < 1e-14);
    }

    #[test]
    fn acoustic_source_terms_match_direct_rhs() {
        // Independent oracle: the short-time rate of (ρ, η) under the acoustic
        // substep must equal the right-hand sides of the two transport equations.
        let g = Grid::new(15.0, 256).unwrap();
        let p = ModelParams::new(1.0, -0.4, 1.3, 0.8, 0.6).unwrap();
        let st = SplitStepper::new(p, g.clone(), 0.01).unwrap();
        let s0 = bump_state(&g);
        let tau = 1e-5;
        let mut fwd = s0.clone();
        st.substep_acoustic(&mut fwd, tau);
        let mut bwd = s0.clone();
        st.substep_acoustic(&mut bwd, -tau);
        let dens = s0.density();
        let ds = g.spectral_derivative_real(&dens, 1);
        let flux_rho: Vec<f64> = (0..256).map(|j| s0.eta[j] - p.alpha * s0.rho[j]).collect();
        let flux_eta: Vec<f64> = (0..256).map(|j| p.beta * s0.rho[j] - p.alpha * s0.eta[j]).collect();
        let dfr = g.spectral_derivative_real(&flux_rho, 1);
        let dfe = g.spectral_derivative_real(&flux_eta, 1);
        for j in 0..256 {
            let rho_t = (-dfr[j] - p.gamma * ds[j]) / p.theta;
            let eta_t = (-dfe[j] + 0.5 * p.alpha * p.gamma * ds[j]) / p.theta;
            let fd_rho = (fwd.rho[j] - bwd.rho[j]) / (2.0 * tau);
            let fd_eta = (fwd.eta[j] - bwd.eta[j]) / (2.0 * tau);
            assert!((fd_rho - rho_t).abs() < 1e-6, "rho at {j}: {fd_rho} vs {rho_t}");
            assert!((fd_eta - eta_t).abs() < 1e-6, "eta at {j}: {fd_eta} vs {eta_t}");
        }
    }

    #[test]
    fn gamma_zero_advects_riemann_variables() {
        let l = 20.0;
        let g = Grid::new(l, 256).unwrap();
        let p = validate_params_with(ModelParams { omega: 1.0, alpha: 0.0, beta: 4.0, gamma: 1.0, theta: 1.0 }, ThetaRange::Relaxed).unwrap();
        let st = SplitStepper::new(p, g.clone(), 0.01).unwrap().with_gamma_zero(true);
        // w₊ = bump, w₋ = 0, i.e. ρ = bump/4, η = bump/2
        let bump = |x: f64| (-(x * x)).exp();
        let mut s = SimState::from_fn(&g, |x| Complex64::new(bump(x), 0.0), |x| bump(x) / 4.0, |x| bump(x) / 2.0);
        st.substep_acoustic(&mut s, 1.5);
        let pair = RiemannPair::from_fields(&s.rho, &s.eta, 2.0);
        let err: f64 = (0..256).map(|j| (pair.w_plus[j] - bump(g.x(j) - 3.0)).powi(2) + pair.w_minus[j].powi(2)).sum::<f64>();
        assert!((err * g.dx()).sqrt() < 1e-10);
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = Grid::new(10.0, 64).unwrap();
        let mut st = SplitStepper::new(params(), g.clone(), 0.05).unwrap();
        let mut s = SimState::zeros(&g);
        st.advance(&mut s, 20).unwrap();
        assert!(s.l2_distance(&SimState::zeros(&g), &g) == 0.0);
        assert!((s.t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_free_evolution_in_gamma_zero_mode() {
        let l = 5.0;
        let g = Grid::new(l, 64).unwrap();
        let k = 2.0 * PI / l;
        let mut st = SplitStepper::new(params(), g.clone(), 0.01).unwrap().with_gamma_zero(true);
        let mut s = SimState::from_fn(&g, |x| Complex64::from_polar(1.0, k * x), |_| 0.0, |_| 0.0);
        st.advance(&mut s, 100).unwrap();
        for (j, z) in s.psi.iter().enumerate() {
            assert!((z - Complex64::from_polar(1.0, k * g.x(j) - k * k * 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn mass_drift_per_step_is_roundoff() {
        let g = Grid::new(20.0, 256).unwrap();
        let mut st = SplitStepper::new(params(), g.clone(), 0.01).unwrap();
        let mut s = bump_state(&g);
        let m0 = g.quadrature(&s.density());
        for _ in 0..50 {
            let before = g.quadrature(&s.density());
            st.step(&mut s).unwrap();
            assert!((g.quadrature(&s.density()) - before).abs() <= 1e-12 * m0);
        }
    }

    #[test]
    fn gamma_zero_flow_is_reversible() {
        let g = Grid::new(20.0, 256).unwrap();
        let st = SplitStepper::new(params(), g.clone(), 0.02).unwrap().with_gamma_zero(true);
        let s0 = bump_state(&g);
        let mut s = s0.clone();
        st.clone().step(&mut s).unwrap();
        st.clone().with_dt(-0.02).step(&mut s).unwrap();
        assert!(s.l2_distance(&s0, &g) < 1e-10);
    }

    #[test]
    fn instability_is_reported() {
        let g = Grid::new(10.0, 64).unwrap();
        let mut st = SplitStepper::new(params(), g.clone(), 0.01).unwrap();
        let mut s = bump_state(&g);
        st.set_reference(&SimState::from_fn(&g, |_| Complex64::new(1e-9, 0.0), |_| 0.0, |_| 0.0));
        assert!(matches!(st.step(&mut s), Err(Error::Instability { .. })));
    }

    #[test]
    fn convergence_needs_three_ordered_steps() {
        let g = Grid::new(10.0, 64).unwrap();
        let st = SplitStepper::new(params(), g.clone(), 0.01).unwrap();
        let s = bump_state(&g);
        let err = measure_convergence_order(&st, &s, 0.1, &[0.05, 0.025]).unwrap_err();
        assert_eq!(err.to_string(), "need ≥3 resolutions");
        assert!(matches!(measure_convergence_order(&st, &s, 0.1, &[0.025, 0.05, 0.0125]), Err(Error::UnorderedResolutions)));
    }

    #[test]
    fn strang_and_lie_orders_on_linear_problem() {
        let g = Grid::new(20.0, 256).unwrap();
        let st = SplitStepper::new(params(), g.clone(), 0.1).unwrap().with_gamma_zero(true);
        let s = bump_state(&g);
        let dts = [0.1, 0.05, 0.025, 0.0125];
        let strang = measure_convergence_order(&st, &s, 1.0, &dts).unwrap();
        assert!((strang - 2.0).abs() < 0.1, "strang order {strang}");
        let lie = measure_convergence_order(&st.clone().with_scheme(Scheme::Lie), &s, 1.0, &dts).unwrap();
        assert!((lie - 1.0).abs() < 0.15, "lie order {lie}");
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs: Vec<f64> = [1.0f64, 0.5, 0.25].iter().map(|v| v.ln()).collect();
        let ys: Vec<f64> = [1.0f64, 0.25, 0.0625].iter().map(|v| v.ln()).collect();
        assert!((least_squares_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }
}
