//! Weight functions and their derivatives.
//!
//! * `TanhCore`: Φ = tanh.
//! * `FarFieldPlateau`: non-increasing, Φ = 1 for s ≤ −1, Φ = 0 for s ≥ 0,
//!   Φ' = −1 on [−0.9, −0.1], built from C^∞ exp-type transitions.
//! * `ProbePsi`: a C^∞ bump supported in [−0.75, −0.25], equal to 1 on [−0.6, −0.4].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    TanhCore,
    FarFieldPlateau,
    ProbePsi,
}

const TRANSITION: f64 = 0.1;
const PROBE_RAMP: f64 = 0.15;
const TABLE_INTERVALS: usize = 4096;

/// exp(−1/u) for u > 0, 0 otherwise.
fn flat(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

fn d_flat(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        flat(u) / (u * u)
    }
}

fn d2_flat(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        flat(u) * (1.0 - 2.0 * u) / u.powi(4)
    }
}

/// Smooth step: 0 for u ≤ 0, 1 for u ≥ 1.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let (a, b) = (flat(u), flat(1.0 - u));
    a / (a + b)
}

pub fn d_smooth_step(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let (a, b) = (flat(u), flat(1.0 - u));
    let (da, db) = (d_flat(u), -d_flat(1.0 - u));
    (da * b - a * db) / (a + b).powi(2)
}

pub fn d2_smooth_step(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let (a, b) = (flat(u), flat(1.0 - u));
    let (da, db) = (d_flat(u), -d_flat(1.0 - u));
    let (dda, ddb) = (d2_flat(u), d2_flat(1.0 - u));
    let num = da * b - a * db;
    let d_num = dda * b - a * ddb;
    let den = (a + b).powi(2);
    let d_den = 2.0 * (a + b) * (da + db);
    (d_num * den - num * d_den) / (den * den)
}

/// Compactly supported bump exp(−1/(u(1−u))) on (0, 1).
fn bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        (-1.0 / (u * (1.0 - u))).exp()
    }
}

fn d_bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let w = u * (1.0 - u);
        bump(u) * (1.0 - 2.0 * u) / (w * w)
    }
}

/// Transition profile G on [0, 1]: rises from 0 to 1 with all derivatives
/// matching, and ∫G = 1 so the plateau weight drops by exactly one overall.
#[derive(Debug)]
struct Transition {
    bump_scale: f64,
    /// Cumulative ∫₀^u G at the table nodes.
    cumulative: Vec<f64>,
}

impl Transition {
    fn new() -> Self {
        let n = TABLE_INTERVALS;
        let bump_mass = simpson_cumulative(&bump, n).last().copied().unwrap();
        let bump_scale = 0.5 / bump_mass;
        let g = |u: f64| smooth_step(u) + bump_scale * bump(u);
        let cumulative = simpson_cumulative(&g, n);
        Transition { bump_scale, cumulative }
    }

    fn g(&self, u: f64) -> f64 {
        smooth_step(u) + self.bump_scale * bump(u)
    }

    fn dg(&self, u: f64) -> f64 {
        d_smooth_step(u) + self.bump_scale * d_bump(u)
    }

    /// ∫₀^u G via cubic Hermite interpolation of the table (G is the exact slope).
    fn integral(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let n = TABLE_INTERVALS;
        if u >= 1.0 {
            return self.cumulative[n];
        }
        let h = 1.0 / n as f64;
        let i = ((u / h) as usize).min(n - 1);
        let (u0, u1) = (i as f64 * h, (i + 1) as f64 * h);
        let s = (u - u0) / h;
        let (p0, p1) = (self.cumulative[i], self.cumulative[i + 1]);
        let (m0, m1) = (self.g(u0) * h, self.g(u1) * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * p1 + (s3 - s2) * m1
    }
}

/// Cumulative composite Simpson integral of f on [0, 1] at n + 1 nodes, each
/// panel refined with one midpoint.
fn simpson_cumulative(f: &dyn Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..n {
        let a = i as f64 * h;
        acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
        out.push(acc);
    }
    out
}

/// A weight with derivatives up to order 3.
#[derive(Debug, Clone)]
pub struct WeightFamily {
    kind: WeightKind,
    transition: Option<Arc<Transition>>,
    /// Comparability constants for the probe: Ψ ≤ c0|Φ'| and |Ψ'| ≤ c1|Φ'|.
    probe_constants: Option<(f64, f64)>,
}

impl WeightFamily {
    pub fn tanh_core() -> Self {
        WeightFamily { kind: WeightKind::TanhCore, transition: None, probe_constants: None }
    }

    pub fn far_field_plateau() -> Self {
        WeightFamily { kind: WeightKind::FarFieldPlateau, transition: Some(Arc::new(Transition::new())), probe_constants: None }
    }

    pub fn probe_psi() -> Self {
        let mut w = WeightFamily { kind: WeightKind::ProbePsi, transition: None, probe_constants: None };
        w.probe_constants = Some(w.measure_probe_constants());
        w
    }

    pub fn new(kind: WeightKind) -> Self {
        match kind {
            WeightKind::TanhCore => Self::tanh_core(),
            WeightKind::FarFieldPlateau => Self::far_field_plateau(),
            WeightKind::ProbePsi => Self::probe_psi(),
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// Stored constants (C for Ψ, C for Ψ') of the probe; `None` for other kinds.
    pub fn probe_constants(&self) -> Option<(f64, f64)> {
        self.probe_constants
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivative(s, 0)
    }

    /// Derivative of the given order (0 ≤ order ≤ 3).
    pub fn derivative(&self, s: f64, order: u32) -> f64 {
        match self.kind {
            WeightKind::TanhCore => tanh_derivative(s, order),
            WeightKind::FarFieldPlateau => self.plateau(s, order),
            WeightKind::ProbePsi => probe(s, order),
        }
    }

    fn plateau(&self, s: f64, order: u32) -> f64 {
        let tr = self.transition.as_ref().expect("plateau weight carries its transition table");
        if order == 3 {
            let h = 1e-4;
            return (self.plateau(s + h, 2) - self.plateau(s - h, 2)) / (2.0 * h);
        }
        if s <= -1.0 {
            return if order == 0 { 1.0 } else { 0.0 };
        }
        if s >= 0.0 {
            return 0.0;
        }
        if s < -1.0 + TRANSITION {
            let u = (s + 1.0) / TRANSITION;
            return match order {
                0 => 1.0 - TRANSITION * tr.integral(u),
                1 => -tr.g(u),
                _ => -tr.dg(u) / TRANSITION,
            };
        }
        if s > -TRANSITION {
            let u = -s / TRANSITION;
            return match order {
                0 => TRANSITION * tr.integral(u),
                1 => -tr.g(u),
                _ => tr.dg(u) / TRANSITION,
            };
        }
        match order {
            0 => -s,
            1 => -1.0,
            _ => 0.0,
        }
    }

    fn measure_probe_constants(&self) -> (f64, f64) {
        // On the probe support [−0.75, −0.25] the plateau has Φ' = −1, so the
        // constants are the sup norms of Ψ and Ψ'.
        let n = 20_000;
        let (mut c0, mut c1) = (0.0f64, 0.0f64);
        for i in 0..=n {
            let s = -0.75 + 0.5 * i as f64 / n as f64;
            c0 = c0.max(probe(s, 0).abs());
            c1 = c1.max(probe(s, 1).abs());
        }
        (c0, c1)
    }
}

fn tanh_derivative(s: f64, order: u32) -> f64 {
    let th = s.tanh();
    let sech2 = 1.0 / s.cosh().powi(2);
    match order {
        0 => th,
        1 => sech2,
        2 => -2.0 * th * sech2,
        3 => -2.0 * sech2 * (sech2 - 2.0 * th * th),
        _ => panic!("weight derivatives are implemented up to order 3"),
    }
}

fn probe(s: f64, order: u32) -> f64 {
    let left = (s + 0.75) / PROBE_RAMP;
    let right = (-0.25 - s) / PROBE_RAMP;
    if left <= 0.0 || right <= 0.0 {
        return 0.0;
    }
    if left < 1.0 {
        return ramp(left, order, 1.0 / PROBE_RAMP);
    }
    if right < 1.0 {
        return ramp(right, order, -1.0 / PROBE_RAMP);
    }
    if order == 0 {
        1.0
    } else {
        0.0
    }
}

fn ramp(u: f64, order: u32, du: f64) -> f64 {
    match order {
        0 => smooth_step(u),
        1 => d_smooth_step(u) * du,
        2 => d2_smooth_step(u) * du * du,
        3 => {
            let h = 1e-5;
            (d2_smooth_step(u + h) - d2_smooth_step(u - h)) / (2.0 * h) * du.powi(3)
        }
        _ => panic!("weight derivatives are implemented up to order 3"),
    }
}
