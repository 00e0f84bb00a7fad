//! Column layout of `series.csv` and `identity.csv`, and readers for both.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed leading columns of `series.csv`.
pub const CORE_COLUMNS: [&str; 18] = [
    "t", "M", "P", "E", "I", "I1", "I2", "J1", "J2", "Itilde+", "Itilde-", "Mff+", "Mff-", "Eff+", "Eff-", "full", "h2", "boundary",
];

/// Window-norm columns, in the order written after [`CORE_COLUMNS`].
///
/// `omega_plus_*` is centred on υ₊t and `omega_minus_*` on υ₋t; the `_alt`
/// variants use the opposite sign of the centre.
pub const WINDOW_COLUMNS: [&str; 12] = [
    "omega_plus_mass",
    "omega_minus_mass",
    "omega_plus_mass_alt",
    "omega_minus_mass_alt",
    "omega_plus_full",
    "omega_minus_full",
    "omega_plus_full_alt",
    "omega_minus_full_alt",
    "omega_0_full",
    "omega_zeta_mass",
    "omega_zeta_full",
    "omega_ffr_mass",
];

/// Functionals whose time derivative is checked against a right-hand side.
pub const IDENTITY_FUNCTIONALS: [&str; 9] = ["I", "J1", "J2", "Itilde+", "Itilde-", "Mff+", "Mff-", "Eff+", "Eff-"];

pub fn series_header() -> Vec<&'static str> {
    CORE_COLUMNS.iter().chain(WINDOW_COLUMNS.iter()).copied().collect()
}

/// A named scalar time series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FunctionalSeries {
    pub fn new(name: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if times.len() != values.len() {
            return Err(Error::NotEnoughSamples(format!("series {name}: {} times for {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NotEnoughSamples(format!("series {name}: times not strictly increasing")));
        }
        Ok(FunctionalSeries { name, times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `series.csv` held in memory, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl SeriesTable {
    pub fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut data = vec![Vec::new(); columns.len()];
        for rec in rdr.records() {
            let rec = rec?;
            for (col, field) in data.iter_mut().zip(rec.iter()) {
                col.push(field.parse::<f64>().map_err(|e| Error::RunDir { path: path.into(), msg: format!("bad number `{field}`: {e}") })?);
            }
        }
        Ok(SeriesTable { columns, data })
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|i| self.data[i].as_slice())
    }

    pub fn times(&self) -> &[f64] {
        self.column("t").unwrap_or(&[])
    }

    pub fn series(&self, name: &str) -> Result<FunctionalSeries> {
        let values = self.column(name).ok_or_else(|| Error::NotEnoughSamples(format!("no column `{name}`")))?;
        FunctionalSeries::new(name, self.times().to_vec(), values.to_vec())
    }
}

/// One row of `identity.csv`: the functional at t, its centred difference
/// quotient, and the derived and printed right-hand sides (as d/dt).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub t: f64,
    pub functional: String,
    pub value: f64,
    pub fd_rate: f64,
    pub rhs: f64,
    pub rhs_printed: f64,
}

pub fn read_identity_rows(path: &Path) -> Result<Vec<IdentityRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_must_increase() {
        assert!(FunctionalSeries::new("a", vec![0.0, 1.0], vec![1.0, 2.0]).is_ok());
        assert!(FunctionalSeries::new("a", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(FunctionalSeries::new("a", vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn header_has_unique_names() {
        let h = series_header();
        let mut sorted = h.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), h.len());
    }
}
