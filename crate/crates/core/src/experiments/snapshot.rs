//! JSON snapshots of a state, reloadable as initial data.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub half_length: f64,
    pub n_points: usize,
    pub psi_re: Vec<f64>,
    pub psi_im: Vec<f64>,
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
}

impl Snapshot {
    pub fn capture(grid: &Grid, state: &SimState) -> Self {
        Snapshot {
            t: state.t,
            half_length: grid.half_length(),
            n_points: grid.n_points(),
            psi_re: state.psi.iter().map(|z| z.re).collect(),
            psi_im: state.psi.iter().map(|z| z.im).collect(),
            rho: state.rho.clone(),
            eta: state.eta.clone(),
        }
    }

    /// Rebuilds the state, refusing a snapshot taken on a different grid.
    pub fn restore(&self, grid: &Grid) -> Result<SimState> {
        if self.n_points != grid.n_points() || (self.half_length - grid.half_length()).abs() > 1e-12 * grid.half_length() {
            return Err(Error::Snapshot(format!(
                "snapshot grid (L = {}, N = {}) differs from config grid (L = {}, N = {})",
                self.half_length,
                self.n_points,
                grid.half_length(),
                grid.n_points()
            )));
        }
        let state = SimState {
            t: self.t,
            psi: self.psi_re.iter().zip(&self.psi_im).map(|(&re, &im)| Complex64::new(re, im)).collect(),
            rho: self.rho.clone(),
            eta: self.eta.clone(),
        };
        state.validate(grid)?;
        Ok(state)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(file, self)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(file)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::new(10.0, 64).unwrap();
        let mut s = SimState::from_fn(&g, |x| Complex64::new(x.sin() / 3.0, x.cos() * 0.1), |x| 0.1 * x, |x| (0.7 * x).tanh());
        s.t = 1.0 / 3.0;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        Snapshot::capture(&g, &s).write(&path).unwrap();
        assert_eq!(Snapshot::read(&path).unwrap().restore(&g).unwrap(), s);
        assert!(Snapshot::read(&path).unwrap().restore(&Grid::new(10.0, 128).unwrap()).is_err());
    }
}
