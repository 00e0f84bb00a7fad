//! Time-dependent scaling functions.
//!
//! With u = κ + t, L = ln u and LL = ln L:
//!
//! ```text
//! λ₁ = u^{2/3} LL^{−2/3}    λ₂ = u^{2/3} LL^{1/3}    μ = u^{1/3} L LL^{5/3}
//! μ* = t L LL               λ  = t^{2/3} LL^{−2/3}
//! ```

use serde::{Deserialize, Serialize};

pub const LITERAL_KAPPA: f64 = 1e100;
pub const DYNAMIC_KAPPA: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaMode {
    /// κ = 10¹⁰⁰: every logarithm is frozen over desk times. Written `paper` in configs and on the command line.
    #[default]
    #[serde(rename = "paper", alias = "literal")]
    Literal,
    /// κ = 10: the logarithmic factors actually vary.
    Dynamic,
}

impl KappaMode {
    pub fn kappa(self) -> f64 {
        match self {
            KappaMode::Literal => LITERAL_KAPPA,
            KappaMode::Dynamic => DYNAMIC_KAPPA,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            KappaMode::Literal => "paper",
            KappaMode::Dynamic => "dynamic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSet {
    pub kappa: f64,
}

/// Scalings and their time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingValues {
    pub t: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu: f64,
    pub d_lambda1: f64,
    pub d_lambda2: f64,
    pub d_mu: f64,
}

impl ScalingSet {
    pub fn new(kappa: f64) -> Self {
        assert!(kappa >= std::f64::consts::E, "κ must exceed e so that log log(κ + t) > 0");
        ScalingSet { kappa }
    }

    pub fn from_mode(mode: KappaMode) -> Self {
        ScalingSet::new(mode.kappa())
    }

    fn logs(&self, t: f64) -> (f64, f64, f64) {
        let u = self.kappa + t;
        let l = u.ln();
        (u, l, l.ln())
    }

    pub fn lambda1(&self, t: f64) -> f64 {
        let (u, _, ll) = self.logs(t);
        u.powf(2.0 / 3.0) * ll.powf(-2.0 / 3.0)
    }

    pub fn lambda2(&self, t: f64) -> f64 {
        let (u, _, ll) = self.logs(t);
        u.powf(2.0 / 3.0) * ll.powf(1.0 / 3.0)
    }

    pub fn mu(&self, t: f64) -> f64 {
        let (u, l, ll) = self.logs(t);
        u.powf(1.0 / 3.0) * l * ll.powf(5.0 / 3.0)
    }

    pub fn mu_star(&self, t: f64) -> f64 {
        let (_, l, ll) = self.logs(t);
        t * l * ll
    }

    /// Window radius t^{2/3} LL^{−2/3} used for the sets around the characteristics.
    pub fn window_lambda(&self, t: f64) -> f64 {
        let (_, _, ll) = self.logs(t);
        t.max(0.0).powf(2.0 / 3.0) * ll.powf(-2.0 / 3.0)
    }

    pub fn d_lambda1(&self, t: f64) -> f64 {
        let (u, l, ll) = self.logs(t);
        self.lambda1(t) * (2.0 / 3.0 / u - 2.0 / 3.0 / (u * l * ll))
    }

    pub fn d_lambda2(&self, t: f64) -> f64 {
        let (u, l, ll) = self.logs(t);
        self.lambda2(t) * (2.0 / 3.0 / u + 1.0 / 3.0 / (u * l * ll))
    }

    pub fn d_mu(&self, t: f64) -> f64 {
        let (u, l, ll) = self.logs(t);
        self.mu(t) * (1.0 / 3.0 / u + 1.0 / (u * l) + 5.0 / 3.0 / (u * l * ll))
    }

    pub fn at(&self, t: f64) -> ScalingValues {
        ScalingValues {
            t,
            lambda1: self.lambda1(t),
            lambda2: self.lambda2(t),
            mu: self.mu(t),
            d_lambda1: self.d_lambda1(t),
            d_lambda2: self.d_lambda2(t),
            d_mu: self.d_mu(t),
        }
    }
}

/// λ(t) = λ₀(1+t)^{2+δ} together with a shift ζ = c·λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarFieldScaling {
    pub delta: f64,
    pub zeta_factor: f64,
    #[serde(default = "unit")]
    pub lambda_scale: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarFieldValues {
    pub lambda: f64,
    pub d_lambda: f64,
    pub zeta: f64,
    pub d_zeta: f64,
}

impl Default for FarFieldScaling {
    fn default() -> Self {
        FarFieldScaling { delta: 0.1, zeta_factor: 1.0, lambda_scale: 1.0 }
    }
}

impl FarFieldScaling {
    pub fn lambda(&self, t: f64) -> f64 {
        self.lambda_scale * (1.0 + t).powf(2.0 + self.delta)
    }

    pub fn d_lambda(&self, t: f64) -> f64 {
        self.lambda_scale * (2.0 + self.delta) * (1.0 + t).powf(1.0 + self.delta)
    }

    pub fn zeta(&self, t: f64) -> f64 {
        self.zeta_factor * self.lambda(t)
    }

    pub fn d_zeta(&self, t: f64) -> f64 {
        self.zeta_factor * self.d_lambda(t)
    }

    pub fn at(&self, t: f64) -> FarFieldValues {
        FarFieldValues { lambda: self.lambda(t), d_lambda: self.d_lambda(t), zeta: self.zeta(t), d_zeta: self.d_zeta(t) }
    }
}

/// Cumulative trapezoid integral of `f` on a grid that is uniform in ln t.
///
/// Returns the partial integrals at each node of `nodes`, starting from 0 at
/// `nodes[0]`.
pub fn partial_integrals(nodes: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in nodes.windows(2) {
        acc += 0.5 * (w[1] - w[0]) * (f(w[0]) + f(w[1]));
        out.push(acc);
    }
    out
}

/// 0, then `per_decade` points per decade from 10^lo to 10^hi.
pub fn log_nodes(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
    let count = (hi - lo) as usize * per_decade;
    let mut nodes = vec![0.0];
    nodes.extend((0..=count).map(|i| 10f64.powf(lo as f64 + i as f64 / per_decade as f64)));
    nodes
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilityRow {
    pub name: String,
    pub total: f64,
    /// Increment over the last decade divided by the total.
    pub last_decade_fraction: f64,
    /// Increment over the last decade divided by the integral up to its start.
    pub last_decade_growth: f64,
    pub expected_convergent: bool,
    pub pass: bool,
}

/// Partial integrals over [0, 10⁶] of the scaling combinations that must be
/// integrable, and of 1/(μλ₁), which must not be.
pub fn integrability_ledger(scalings: &ScalingSet) -> Vec<IntegrabilityRow> {
    let nodes = log_nodes(-4, 6, 400);
    let s = *scalings;
    type Integrand = Box<dyn Fn(f64) -> f64>;
    let cases: Vec<(&str, Integrand, bool)> = vec![
        ("1/(mu*lambda2)", Box::new(move |t| 1.0 / (s.mu(t) * s.lambda2(t))), true),
        ("lambda1'/(mu*lambda1)", Box::new(move |t| s.d_lambda1(t) / (s.mu(t) * s.lambda1(t))), true),
        ("lambda2'/(mu*lambda2)", Box::new(move |t| s.d_lambda2(t) / (s.mu(t) * s.lambda2(t))), true),
        ("mu'/mu^2", Box::new(move |t| s.d_mu(t) / s.mu(t).powi(2)), true),
        ("1/(mu*lambda1)", Box::new(move |t| 1.0 / (s.mu(t) * s.lambda1(t))), false),
    ];
    let decade_start = nodes.iter().position(|&t| t >= 1e5 * (1.0 - 1e-12)).unwrap();
    cases
        .into_iter()
        .map(|(name, f, convergent)| {
            let partial = partial_integrals(&nodes, f);
            let total = *partial.last().unwrap();
            let before = partial[decade_start];
            let inc = total - before;
            let last_decade_fraction = inc / total;
            let last_decade_growth = inc / before;
            let monotone = partial.windows(2).all(|w| w[1] >= w[0]);
            let pass = if convergent {
                monotone && last_decade_fraction < 0.01
            } else {
                monotone && last_decade_growth >= 0.01
            };
            IntegrabilityRow { name: name.into(), total, last_decade_fraction, last_decade_growth, expected_convergent: convergent, pass }
        })
        .collect()
}
