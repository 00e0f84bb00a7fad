//! The simulation driver: steps a config to completion and writes the run
//! directory.
//!
//! ```text
//! <out>/config.toml       the resolved config
//! <out>/series.csv        one row per output time, see `series`
//! <out>/identity.csv      centred differences against right-hand sides
//! <out>/breakdowns.json   per-term right-hand sides at every output time
//! <out>/report.json       conservation and boundary assertions
//! <out>/snapshots/        JSON states
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::{ExperimentConfig, InitialData, WindowSpec};
use super::initial::build_initial_state;
use super::reports::{Assertion, Report};
use super::series::{series_header, IdentityRow, IDENTITY_FUNCTIONALS};
use super::snapshot::Snapshot;
use crate::diagnostics::{conserved, relative_drift, FieldBundle};
use crate::dynamics::SplitStepper;
use crate::error::{Error, Result};
use crate::grid::{boundary_mass_monitor, Grid, SimState};
use crate::model::ModelParams;
use crate::solitons::{center_of_mass, shape_error};
use crate::virial::{
    farfield_energy, farfield_energy_rhs, farfield_mass, farfield_mass_rhs, functional_i, functional_i_tilde, functional_j,
    virial_rhs_i, virial_rhs_i_tilde, virial_rhs_j, window_norm, Branch, Breakdown, Density, FarFieldScaling, ScalingSet, Sign,
    VirialFrame, Window, ZetaLaw,
};

pub const MASS_DRIFT_TOL: f64 = 1e-10;
pub const ENERGY_DRIFT_TOL: f64 = 1e-6;
pub const MOMENTUM_DRIFT_TOL: f64 = 1e-6;
pub const SOLITON_COM_TOL: f64 = 1e-2;
pub const SOLITON_SHAPE_TOL: f64 = 1e-3;

/// Everything needed to evaluate the recorded quantities at one state.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub grid: Grid,
    pub params: ModelParams,
    pub scalings: ScalingSet,
    pub farfield: FarFieldScaling,
    pub windows: Vec<(Window, Density)>,
}

impl Evaluator {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let grid = cfg.grid.build()?;
        Ok(Evaluator {
            grid,
            params: cfg.params,
            scalings: ScalingSet::from_mode(cfg.diagnostics.kappa_mode),
            farfield: cfg.diagnostics.farfield,
            windows: windows_for(&cfg.params, &cfg.diagnostics.windows, cfg.diagnostics.farfield),
        })
    }

    /// Values of the functionals in [`IDENTITY_FUNCTIONALS`] order.
    pub fn identity_values(&self, state: &SimState) -> [f64; 9] {
        let (g, p) = (&self.grid, &self.params);
        let sv = self.scalings.at(state.t);
        let fv = self.farfield.at(state.t);
        let frame = VirialFrame::new(g, p, state);
        let b = &frame.base;
        [
            functional_i(g, p, b, &sv).total,
            functional_j(g, p, &frame, &sv, Branch::One),
            functional_j(g, p, &frame, &sv, Branch::Two),
            functional_i_tilde(g, p, &frame, &sv, Sign::Plus),
            functional_i_tilde(g, p, &frame, &sv, Sign::Minus),
            farfield_mass(g, b, &fv, Sign::Plus),
            farfield_mass(g, b, &fv, Sign::Minus),
            farfield_energy(g, p, b, &fv, Sign::Plus).total,
            farfield_energy(g, p, b, &fv, Sign::Minus).total,
        ]
    }

    /// Right-hand sides as d/dt of each functional, in [`IDENTITY_FUNCTIONALS`] order.
    pub fn identity_rhs(&self, state: &SimState) -> Vec<Breakdown> {
        let (g, p) = (&self.grid, &self.params);
        let sv = self.scalings.at(state.t);
        let fv = self.farfield.at(state.t);
        let frame = VirialFrame::new(g, p, state);
        let b = &frame.base;
        vec![
            negated(virial_rhs_i(g, p, b, &sv)),
            virial_rhs_j(g, p, &frame, &sv, Branch::One),
            virial_rhs_j(g, p, &frame, &sv, Branch::Two),
            negated(virial_rhs_i_tilde(g, p, &frame, &sv, Sign::Plus)),
            negated(virial_rhs_i_tilde(g, p, &frame, &sv, Sign::Minus)),
            farfield_mass_rhs(g, p, b, &fv, Sign::Plus),
            farfield_mass_rhs(g, p, b, &fv, Sign::Minus),
            farfield_energy_rhs(g, p, b, &fv, Sign::Plus),
            farfield_energy_rhs(g, p, b, &fv, Sign::Minus),
        ]
    }

    /// One full `series.csv` row, with the boundary fraction for `margin`.
    pub fn series_row(&self, state: &SimState, margin: f64) -> Result<Vec<f64>> {
        let (g, p) = (&self.grid, &self.params);
        let c = conserved(g, p, state);
        let sv = self.scalings.at(state.t);
        let b = FieldBundle::new(g, state);
        let ip = functional_i(g, p, &b, &sv);
        let ids = self.identity_values(state);
        let full = g.quadrature_with(|j| b.psi_x[j].norm_sqr() + b.density[j] + b.rho[j].powi(2) + b.eta[j].powi(2));
        let mut row = vec![state.t, c.mass, c.momentum, c.energy, ip.total, ip.i1, ip.i2];
        row.extend_from_slice(&ids[1..]);
        row.push(full);
        row.push(g.h_s_norm(&state.psi, 2.0));
        row.push(boundary_mass_monitor(g, state, margin));
        for (w, d) in &self.windows {
            row.push(window_norm(g, state, w, *d, &self.scalings)?);
        }
        Ok(row)
    }
}

fn negated(mut b: Breakdown) -> Breakdown {
    for t in &mut b.terms {
        t.derived = -t.derived;
        t.printed = -t.printed;
    }
    b
}

/// Windows in `WINDOW_COLUMNS` order.
pub fn windows_for(params: &ModelParams, w: &WindowSpec, farfield: FarFieldScaling) -> Vec<(Window, Density)> {
    let d = params.derived();
    let pm = |v: f64| Window::OmegaPm { c: w.pm_c, center_speed: v };
    let (up, um) = (d.upsilon_plus, d.upsilon_minus);
    vec![
        (pm(up), Density::Mass),
        (pm(um), Density::Mass),
        (pm(-up), Density::Mass),
        (pm(-um), Density::Mass),
        (pm(up), Density::Full),
        (pm(um), Density::Full),
        (pm(-up), Density::Full),
        (pm(-um), Density::Full),
        (Window::Omega0 { c: w.zero_c, big_c: w.zero_big_c }, Density::FullQuartic),
        (Window::OmegaZeta { c1: w.zeta_c1, c2: w.zeta_c2, zeta: ZetaLaw::LogPower { delta: w.zeta_log_delta } }, Density::Mass),
        (Window::OmegaZeta { c1: w.zeta_c1, c2: w.zeta_c2, zeta: ZetaLaw::Power { delta: w.zeta_pow_delta } }, Density::Full),
        (Window::OmegaFfr { scaling: farfield }, Density::Mass),
    ]
}

#[derive(Debug, Clone, Serialize)]
struct BreakdownRecord<'a> {
    t: f64,
    functional: &'a str,
    breakdown: &'a Breakdown,
}

/// Summary of a finished run. Drifts are the largest relative drift over all output times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub steps: usize,
    pub outputs: usize,
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub energy_drift: f64,
    pub boundary_max: f64,
    pub runtime_seconds: f64,
    pub report: Report,
}

struct Pending {
    t: f64,
    before: [f64; 9],
    value: [f64; 9],
    rhs: Vec<Breakdown>,
}

/// Runs `cfg` and writes the run directory `out`.
///
/// Deterministic: the same config produces bit-identical `series.csv` and
/// `identity.csv`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let started = Instant::now();
    fs::create_dir_all(out.join("snapshots"))?;
    fs::write(out.join("config.toml"), cfg.to_toml_string()?)?;

    let ev = Evaluator::new(cfg)?;
    let grid = ev.grid.clone();
    let initial = build_initial_state(cfg, &grid)?;
    let mut state = initial.clone();
    let t0 = state.t;
    let mut stepper = SplitStepper::new(cfg.params, grid.clone(), cfg.time.dt)?.with_scheme(cfg.time.scheme);
    let (steps, stride, dt) = (cfg.time.steps(), cfg.time.output_stride, cfg.time.dt);
    let diag = &cfg.diagnostics;

    let mut series = csv::Writer::from_path(out.join("series.csv"))?;
    series.write_record(series_header())?;
    let mut identity = csv::WriterBuilder::new().has_headers(false).from_path(out.join("identity.csv"))?;
    identity.write_record(["t", "functional", "value", "fd_rate", "rhs", "rhs_printed"])?;
    let mut breakdowns = std::io::BufWriter::new(fs::File::create(out.join("breakdowns.json"))?);
    breakdowns.write_all(b"[")?;
    let mut first_breakdown = true;

    Snapshot::capture(&grid, &state).write(&out.join("snapshots").join("initial.json"))?;
    let c0 = conserved(&grid, &cfg.params, &state);
    let c0 = [c0.mass, c0.momentum, c0.energy];
    // Largest relative deviation of M, P, E over the output times.
    let mut drift_max = [0.0f64; 3];
    let mut boundary_max: f64 = 0.0;
    let mut outputs = 0usize;
    let mut before: Option<[f64; 9]> = None;
    let mut pending: Option<Pending> = None;

    for n in 0..=steps {
        if n % stride == 0 || n == steps {
            let row = ev.series_row(&state, diag.boundary_margin)?;
            let boundary = row[17];
            for (k, d) in drift_max.iter_mut().enumerate() {
                *d = d.max(relative_drift(c0[k], row[k + 1]));
            }
            boundary_max = boundary_max.max(boundary);
            series.write_record(row.iter().map(|v| format!("{v:e}")))?;
            outputs += 1;
            if boundary > diag.boundary_threshold {
                series.flush()?;
                return Err(Error::BoundaryMass { t: state.t, fraction: boundary, threshold: diag.boundary_threshold });
            }
            if diag.identities && n > 0 && n < steps {
                if let Some(b) = before.take() {
                    pending = Some(Pending { t: state.t, before: b, value: ev.identity_values(&state), rhs: ev.identity_rhs(&state) });
                }
            }
            if diag.snapshot_every > 0 && outputs % diag.snapshot_every == 0 {
                Snapshot::capture(&grid, &state).write(&out.join("snapshots").join(format!("step_{n:08}.json")))?;
            }
        }
        if n == steps {
            break;
        }
        if diag.identities && (n + 1) % stride == 0 && n + 1 < steps {
            before = Some(ev.identity_values(&state));
        }
        stepper.step(&mut state)?;
        // Avoid accumulating round-off in the clock.
        state.t = t0 + (n + 1) as f64 * dt;
        if let Some(p) = pending.take() {
            let after = ev.identity_values(&state);
            for (k, name) in IDENTITY_FUNCTIONALS.iter().enumerate() {
                identity.serialize(IdentityRow {
                    t: p.t,
                    functional: name.to_string(),
                    value: p.value[k],
                    fd_rate: (after[k] - p.before[k]) / (2.0 * dt),
                    rhs: p.rhs[k].derived_total(),
                    rhs_printed: p.rhs[k].printed_total(),
                })?;
                if !first_breakdown {
                    breakdowns.write_all(b",\n")?;
                }
                first_breakdown = false;
                serde_json::to_writer(&mut breakdowns, &BreakdownRecord { t: p.t, functional: name, breakdown: &p.rhs[k] })?;
            }
        }
    }
    breakdowns.write_all(b"]\n")?;
    breakdowns.flush()?;
    series.flush()?;
    identity.flush()?;
    Snapshot::capture(&grid, &state).write(&out.join("snapshots").join("final.json"))?;

    let [dm, dp, de] = drift_max;
    let mut assertions = vec![
        Assertion::at_most("mass_drift", dm, MASS_DRIFT_TOL),
        Assertion::at_most("momentum_drift", dp, MOMENTUM_DRIFT_TOL),
        Assertion::at_most("energy_drift", de, ENERGY_DRIFT_TOL),
        Assertion::at_most("boundary_fraction", boundary_max, diag.boundary_threshold),
    ];
    if let InitialData::Soliton { c, .. } = cfg.initial {
        let travelled = c * state.t;
        let com = center_of_mass(&grid, &state) - center_of_mass(&grid, &initial);
        assertions.push(Assertion::at_most("soliton_center_of_mass", (com - travelled).abs(), SOLITON_COM_TOL));
        assertions.push(Assertion::at_most("soliton_shape", shape_error(&grid, &initial.psi, &state.psi, travelled), SOLITON_SHAPE_TOL));
    }
    let runtime = started.elapsed().as_secs_f64();
    let report = Report::new(
        "run",
        "Conservation and boundary gates of a single run. Desk-scale: the run checks the integrator, not any asymptotic statement.",
        assertions,
        serde_json::json!({ "name": cfg.name, "steps": steps, "outputs": outputs, "runtime_seconds": runtime }),
    );
    report.write(&out.join("report.json"))?;
    Ok(RunSummary {
        dir: out.to_path_buf(),
        steps,
        outputs,
        mass_drift: dm,
        momentum_drift: dp,
        energy_drift: de,
        boundary_max,
        runtime_seconds: runtime,
        report,
    })
}

/// Runs independent configs on worker threads, one per config.
pub fn run_many(jobs: &[(ExperimentConfig, PathBuf)]) -> Vec<Result<RunSummary>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|(cfg, dir)| s.spawn(move || run(cfg, dir))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Error::Config("worker thread panicked".into())))).collect()
    })
}
