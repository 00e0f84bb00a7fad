//! Periodic grid on [−L, L), field storage and spectral calculus.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Uniform periodic grid with cached FFT plans.
#[derive(Clone)]
pub struct Grid {
    half_length: f64,
    n_points: usize,
    dx: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("n_points", &self.n_points)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.half_length == other.half_length && self.n_points == other.n_points
    }
}

impl Grid {
    pub fn new(half_length: f64, n_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!("half length must be positive, got {half_length}")));
        }
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N must be a power of two ≥ 8, got {n_points}")));
        }
        let n = n_points as i64;
        let wavenumbers = (0..n)
            .map(|j| {
                let signed = if j < n / 2 { j } else { j - n };
                PI * signed as f64 / half_length
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Grid {
            half_length,
            n_points,
            dx: 2.0 * half_length / n_points as f64,
            wavenumbers,
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Wavenumbers in FFT order; index N/2 is the Nyquist mode.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// In-place forward transform (unnormalised).
    pub fn fft_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// In-place inverse transform, normalised so that it inverts [`Grid::fft_in_place`].
    pub fn ifft_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / self.n_points as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
    }

    pub fn transform(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.fft_in_place(&mut buf);
        buf
    }

    pub fn transform_real(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft_in_place(&mut buf);
        buf
    }

    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectrum.to_vec();
        self.ifft_in_place(&mut buf);
        buf
    }

    /// (ik)^order, with the Nyquist mode zeroed for odd orders so that real
    /// fields have real derivatives.
    pub fn derivative_symbol(&self, j: usize, order: u32) -> Complex64 {
        if order % 2 == 1 && j == self.nyquist_index() {
            return Complex64::new(0.0, 0.0);
        }
        (I * self.wavenumbers[j]).powu(order)
    }

    pub fn spectral_derivative(&self, f: &[Complex64], order: u32) -> Vec<Complex64> {
        let mut buf = self.transform(f);
        self.apply_derivative(&mut buf, order);
        self.ifft_in_place(&mut buf);
        buf
    }

    pub fn spectral_derivative_real(&self, f: &[f64], order: u32) -> Vec<f64> {
        let mut buf = self.transform_real(f);
        self.apply_derivative(&mut buf, order);
        self.ifft_in_place(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    fn apply_derivative(&self, spectrum: &mut [Complex64], order: u32) {
        for (j, z) in spectrum.iter_mut().enumerate() {
            *z *= self.derivative_symbol(j, order);
        }
    }

    /// Rectangle rule dx·Σf, exact for trigonometric polynomials on the grid.
    pub fn quadrature(&self, f: &[f64]) -> f64 {
        self.dx * f.iter().sum::<f64>()
    }

    pub fn quadrature_with<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.dx * (0..self.n_points).map(f).sum::<f64>()
    }

    /// Sobolev norm (Σ (1+k²)^s |f̂_k|² · 2L/N²)^{1/2}.
    pub fn h_s_norm(&self, f: &[Complex64], s: f64) -> f64 {
        let spectrum = self.transform(f);
        let norm = 2.0 * self.half_length / (self.n_points as f64).powi(2);
        let sum: f64 = spectrum
            .iter()
            .zip(&self.wavenumbers)
            .map(|(z, k)| (1.0 + k * k).powf(s) * z.norm_sqr())
            .sum();
        (sum * norm).sqrt()
    }

    /// Samples f(x − d) by a spectral phase shift.
    pub fn shift(&self, f: &[Complex64], d: f64) -> Vec<Complex64> {
        let mut buf = self.transform(f);
        self.apply_shift(&mut buf, d, false);
        self.ifft_in_place(&mut buf);
        buf
    }

    pub fn shift_real(&self, f: &[f64], d: f64) -> Vec<f64> {
        let mut buf = self.transform_real(f);
        self.apply_shift(&mut buf, d, true);
        self.ifft_in_place(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Multiplies a spectrum by e^{−ikd}. For real fields the Nyquist factor
    /// is replaced by its real part so the result stays real.
    pub fn apply_shift(&self, spectrum: &mut [Complex64], d: f64, real_field: bool) {
        let ny = self.nyquist_index();
        for (j, z) in spectrum.iter_mut().enumerate() {
            let phase = -self.wavenumbers[j] * d;
            if real_field && j == ny {
                *z *= phase.cos();
            } else {
                *z *= Complex64::from_polar(1.0, phase);
            }
        }
    }

    /// Two-thirds rule: keeps modes with |j| ≤ N/3.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let n = self.n_points as i64;
        (0..n)
            .map(|j| {
                let signed = if j < n / 2 { j } else { j - n };
                3 * signed.abs() <= n
            })
            .collect()
    }

    /// Applies the two-thirds rule to a real field.
    pub fn dealias_real(&self, f: &[f64]) -> Vec<f64> {
        let mut buf = self.transform_real(f);
        for (z, keep) in buf.iter_mut().zip(self.dealias_mask()) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        self.ifft_in_place(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Fraction of each cell [x_j − dx/2, x_j + dx/2) lying within distance
    /// `width` of the box edge ±L (periodically).
    fn edge_overlap(&self, j: usize, width: f64) -> f64 {
        let mut y = self.x(j) + self.half_length;
        if y >= self.half_length {
            y -= 2.0 * self.half_length;
        }
        let lo = (y - 0.5 * self.dx).max(-width);
        let hi = (y + 0.5 * self.dx).min(width);
        ((hi - lo) / self.dx).clamp(0.0, 1.0)
    }
}

/// Time stamp plus the three periodic fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub psi: Vec<Complex64>,
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
}

impl SimState {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n_points();
        SimState {
            t: 0.0,
            psi: vec![Complex64::new(0.0, 0.0); n],
            rho: vec![0.0; n],
            eta: vec![0.0; n],
        }
    }

    /// Builds a state by sampling closures at the grid nodes.
    pub fn from_fn(
        grid: &Grid,
        psi: impl Fn(f64) -> Complex64,
        rho: impl Fn(f64) -> f64,
        eta: impl Fn(f64) -> f64,
    ) -> Self {
        let xs = grid.coordinates();
        SimState {
            t: 0.0,
            psi: xs.iter().map(|&x| psi(x)).collect(),
            rho: xs.iter().map(|&x| rho(x)).collect(),
            eta: xs.iter().map(|&x| eta(x)).collect(),
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let n = grid.n_points();
        if self.psi.len() != n || self.rho.len() != n || self.eta.len() != n {
            return Err(Error::InvalidGrid(format!(
                "field lengths ({}, {}, {}) do not match N = {n}",
                self.psi.len(),
                self.rho.len(),
                self.eta.len()
            )));
        }
        let finite = self.t.is_finite()
            && self.psi.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            && self.rho.iter().all(|v| v.is_finite())
            && self.eta.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGrid("non-finite field entry".into()));
        }
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Shifts all three fields to x − d.
    pub fn shifted(&self, grid: &Grid, d: f64) -> SimState {
        SimState {
            t: self.t,
            psi: grid.shift(&self.psi, d),
            rho: grid.shift_real(&self.rho, d),
            eta: grid.shift_real(&self.eta, d),
        }
    }

    /// Cyclic translation by an integer number of cells.
    pub fn rolled(&self, cells: usize) -> SimState {
        let mut out = self.clone();
        out.psi.rotate_right(cells);
        out.rho.rotate_right(cells);
        out.eta.rotate_right(cells);
        out
    }

    pub fn l2_distance(&self, other: &SimState, grid: &Grid) -> f64 {
        let psi: f64 = self.psi.iter().zip(&other.psi).map(|(a, b)| (a - b).norm_sqr()).sum();
        let rho: f64 = self.rho.iter().zip(&other.rho).map(|(a, b)| (a - b).powi(2)).sum();
        let eta: f64 = self.eta.iter().zip(&other.eta).map(|(a, b)| (a - b).powi(2)).sum();
        (grid.dx() * (psi + rho + eta)).sqrt()
    }
}

/// Fraction of ∫(|ψ|² + ρ² + η²) within the outer `margin_fraction` of the box
/// on each side. Cells straddling the margin edge count proportionally.
pub fn boundary_mass_monitor(grid: &Grid, state: &SimState, margin_fraction: f64) -> f64 {
    let width = 2.0 * grid.half_length() * margin_fraction;
    let mut total = 0.0;
    let mut edge = 0.0;
    for j in 0..grid.n_points() {
        let d = state.psi[j].norm_sqr() + state.rho[j].powi(2) + state.eta[j].powi(2);
        total += d;
        edge += d * grid.edge_overlap(j, width);
    }
    if total == 0.0 {
        0.0
    } else {
        edge / total
    }
}

pub fn l2_norm(grid: &Grid, f: &[f64]) -> f64 {
    grid.quadrature_with(|j| f[j] * f[j]).sqrt()
}

pub fn l2_norm_complex(grid: &Grid, f: &[Complex64]) -> f64 {
    grid.quadrature_with(|j| f[j].norm_sqr()).sqrt()
}
