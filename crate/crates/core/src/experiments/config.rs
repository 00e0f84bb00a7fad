//! Declarative experiment configuration (TOML) with dotted-key overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::Scheme;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{validate_params, ModelParams};
use crate::virial::{FarFieldScaling, KappaMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_length: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.half_length, self.n_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_final: f64,
    /// Diagnostics are written every `output_stride` steps.
    pub output_stride: usize,
    #[serde(default)]
    pub scheme: Scheme,
}

impl TimeSpec {
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Initial amplitude ψ₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// A·exp(−(x−x₀)²/w²)·exp(i(v x/(2ω) + chirp·(x−x₀)²)).
    Gaussian { amplitude: f64, width: f64, center: f64, speed: f64, chirp: f64 },
    /// Solitary wave with speed c and phase frequency λ; also sets ρ, η.
    Soliton { c: f64, lambda: f64 },
    /// Plane wave e^{ikx} under a flat-topped envelope A·exp(−((x−x₀)/w)⁴).
    PlaneModulated { amplitude: f64, wavenumber: f64, width: f64, center: f64 },
    /// Gaussian envelope times a seeded random trigonometric polynomial.
    Random { amplitude: f64, width: f64, modes: usize },
    /// A snapshot written by a previous run.
    File { path: PathBuf },
}

/// Initial acoustic pair, ignored for solitons and snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AcousticData {
    Zero,
    /// ρ, η slaved to |ψ|² as in the θ → 0 reduction.
    Slaved,
    /// Independent gaussian bumps.
    Bump { rho: f64, eta: f64, width: f64, center: f64 },
}

/// Parameters of the windows recorded in the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    /// Half-width factor of the windows around the characteristics.
    pub pm_c: f64,
    pub zero_c: f64,
    pub zero_big_c: f64,
    pub zeta_c1: f64,
    pub zeta_c2: f64,
    /// ζ = (1+t)·log^{1+δ}(e+t) for the mass window.
    pub zeta_log_delta: f64,
    /// ζ = (1+t)^{2+δ} for the energy window.
    pub zeta_pow_delta: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec { pm_c: 1.0, zero_c: 1.0, zero_big_c: 2.0, zeta_c1: 4.0, zeta_c2: 8.0, zeta_log_delta: 0.5, zeta_pow_delta: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    #[serde(default)]
    pub kappa_mode: KappaMode,
    /// Far-field scaling; the default stretches λ so that the window edges span several grid cells.
    #[serde(default = "resolved_farfield")]
    pub farfield: FarFieldScaling,
    #[serde(default)]
    pub windows: WindowSpec,
    /// Record centred time differences of every functional.
    #[serde(default = "yes")]
    pub identities: bool,
    /// Outer fraction of the box watched by the boundary monitor.
    #[serde(default = "default_margin")]
    pub boundary_margin: f64,
    #[serde(default = "default_boundary_threshold")]
    pub boundary_threshold: f64,
    /// Write a snapshot every this many outputs; 0 keeps only the first and last.
    #[serde(default)]
    pub snapshot_every: usize,
}

fn yes() -> bool {
    true
}

fn resolved_farfield() -> FarFieldScaling {
    FarFieldScaling { delta: 0.1, zeta_factor: 0.1, lambda_scale: 16.0 }
}

fn default_margin() -> f64 {
    0.05
}

fn default_boundary_threshold() -> f64 {
    1e-6
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        DiagnosticsSpec {
            kappa_mode: KappaMode::default(),
            farfield: resolved_farfield(),
            windows: WindowSpec::default(),
            identities: true,
            boundary_margin: default_margin(),
            boundary_threshold: default_boundary_threshold(),
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub params: ModelParams,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub initial: InitialData,
    #[serde(default = "zero_acoustic")]
    pub acoustic: AcousticData,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
}

fn default_name() -> String {
    "run".into()
}

fn zero_acoustic() -> AcousticData {
    AcousticData::Zero
}

impl ExperimentConfig {
    /// The desk-scale reference run: N = 2048, L = 100, dt = 1e−3, T = 20.
    pub fn standard() -> Self {
        ExperimentConfig {
            name: "standard".into(),
            seed: 0,
            params: ModelParams { omega: 1.0, alpha: 0.2, beta: 1.0, gamma: 1.0, theta: 0.8 },
            grid: GridSpec { half_length: 100.0, n_points: 2048 },
            time: TimeSpec { dt: 1e-3, t_final: 20.0, output_stride: 100, scheme: Scheme::Strang },
            initial: InitialData::Gaussian { amplitude: 0.5, width: 8.0, center: 0.0, speed: 0.0, chirp: 0.0 },
            acoustic: AcousticData::Bump { rho: 0.1, eta: -0.05, width: 8.0, center: 0.0 },
            diagnostics: DiagnosticsSpec {
                kappa_mode: KappaMode::Dynamic,
                ..DiagnosticsSpec::default()
            },
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Loads a config and applies `key=value` overrides before validation.
    pub fn load_with_overrides(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = cfg.with_overrides(overrides)?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Applies dotted-key overrides such as `params.alpha=0.3`. Every key must
    /// name a field already present in the fully serialised config.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = toml::Table::try_from(self)?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{item}` is not of the form key=value")))?;
            set_dotted(&mut table, key.trim(), parse_scalar(raw.trim()))?;
        }
        let cfg: ExperimentConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self.params)?;
        let grid = self.grid.build()?;
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", t.dt)));
        }
        if !(t.t_final >= 0.0 && t.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final = {} must be non-negative", t.t_final)));
        }
        if ((t.t_final / t.dt).round() * t.dt - t.t_final).abs() > 1e-9 * t.t_final.max(1.0) {
            return Err(Error::Config("t_final must be an integer multiple of dt".into()));
        }
        if t.output_stride == 0 {
            return Err(Error::Config("output_stride must be ≥ 1".into()));
        }
        let d = &self.diagnostics;
        if !(d.boundary_margin > 0.0 && d.boundary_margin < 0.5) {
            return Err(Error::Config("boundary_margin must lie in (0, 0.5)".into()));
        }
        if !(d.farfield.delta > 0.0 && d.farfield.zeta_factor > 0.0 && d.farfield.lambda_scale > 0.0) {
            return Err(Error::Config("farfield delta, zeta_factor and lambda_scale must be positive".into()));
        }
        let w = &d.windows;
        if !(w.pm_c > 0.0 && w.zero_c < w.zero_big_c && w.zeta_c1 < w.zeta_c2) {
            return Err(Error::Config("window constants must satisfy c > 0, c < C, c1 < c2".into()));
        }
        // Characteristics must stay inside the box over the run.
        let reach = self.params.max_speed() * t.t_final;
        if reach >= grid.half_length() {
            return Err(Error::Config(format!(
                "acoustic characteristics travel {reach:.3} over the run but the box half-length is {}",
                grid.half_length()
            )));
        }
        match &self.initial {
            InitialData::Gaussian { width, .. } | InitialData::PlaneModulated { width, .. } | InitialData::Random { width, .. }
                if *width <= 0.0 =>
            {
                Err(Error::Config("initial width must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

fn parse_scalar(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::UnknownOverride(key.into()))?;
    let mut cur = table;
    for p in parts {
        cur = match cur.get_mut(p) {
            Some(toml::Value::Table(t)) => t,
            _ => return Err(Error::UnknownOverride(key.into())),
        };
    }
    match cur.get_mut(last) {
        Some(slot) => {
            // Integers given for float fields stay valid floats.
            *slot = match (&*slot, value) {
                (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
                (_, v) => v,
            };
            Ok(())
        }
        None => Err(Error::UnknownOverride(key.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_config_round_trips() {
        let cfg = ExperimentConfig::standard();
        cfg.validate().unwrap();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn overrides_apply_and_reject_unknown_keys() {
        let cfg = ExperimentConfig::standard();
        let o = cfg.with_overrides(&["params.alpha=0.3".into(), "time.t_final=1".into()]).unwrap();
        assert_eq!(o.params.alpha, 0.3);
        assert_eq!(o.time.t_final, 1.0);
        assert!(matches!(cfg.with_overrides(&["params.delta=1".into()]), Err(Error::UnknownOverride(_))));
        assert!(matches!(cfg.with_overrides(&["nope=1".into()]), Err(Error::UnknownOverride(_))));
        assert!(cfg.with_overrides(&["params.alpha".into()]).is_err());
    }

    #[test]
    fn invalid_theta_is_reported() {
        let err = ExperimentConfig::standard().with_overrides(&["params.theta=1.0".into()]).unwrap_err();
        assert_eq!(err.to_string(), "theta not in (0,1)");
    }

    #[test]
    fn unknown_fields_in_files_are_rejected() {
        let mut text = ExperimentConfig::standard().to_toml_string().unwrap();
        text.push_str("\n[extra]\nx = 1\n");
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn box_must_contain_characteristics() {
        let err = ExperimentConfig::standard().with_overrides(&["time.t_final=200".into()]).unwrap_err();
        assert!(err.to_string().contains("characteristics"), "{err}");
    }

    #[test]
    fn override_values_parse_as_toml() {
        assert_eq!(parse_scalar("0.5"), toml::Value::Float(0.5));
        assert_eq!(parse_scalar("\"gaussian\""), toml::Value::String("gaussian".into()));
        assert_eq!(parse_scalar("dynamic"), toml::Value::String("dynamic".into()));
    }
}
