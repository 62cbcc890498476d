//! Driving records and their CSV + JSON sidecar serialization.

use crate::error::{Result, SleError};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Full parameter vector of a process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SleParams {
    pub kappa: f64,
    pub mu: f64,
    #[serde(default)]
    pub rho: Vec<f64>,
    pub p: usize,
}

impl SleParams {
    pub fn new(kappa: f64, mu: f64, rho: Vec<f64>, p: usize) -> Result<Self> {
        let s = SleParams { kappa, mu, rho, p };
        s.validate()?;
        Ok(s)
    }

    pub fn radial(kappa: f64, mu: f64) -> Self {
        SleParams {
            kappa,
            mu,
            rho: Vec::new(),
            p: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa < 8.0) {
            return Err(SleError::Domain(format!("κ = {} outside (0,8)", self.kappa)));
        }
        if !self.mu.is_finite() || self.rho.iter().any(|r| !r.is_finite()) {
            return Err(SleError::Domain("non-finite μ or ρ".into()));
        }
        if self.p == 0 {
            return Err(SleError::Domain("p must be positive".into()));
        }
        Ok(())
    }
}

/// Which process produced a record; fixes how the Loewner chain is rebuilt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Radial,
    RadialRho,
    MultiradialCommon,
    Watermelon,
}

/// Raw sampler output on the uniform grid `k·dt`, `k = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingRecord {
    pub scheme: Scheme,
    pub params: SleParams,
    /// Starting angles: the driver(s) first, then force or spectator points.
    pub thetas: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    #[serde(skip)]
    pub xi: Vec<f64>,
    /// Force-point paths V^j (or spectator images for multiradial records).
    #[serde(skip)]
    pub force_points: Vec<Vec<f64>>,
    #[serde(skip)]
    pub omegas: Vec<Vec<f64>>,
}

impl DrivingRecord {
    pub fn n_curves(&self) -> usize {
        if self.scheme == Scheme::MultiradialCommon {
            self.omegas.len()
        } else {
            1
        }
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Driving value of curve `j` at grid index `k`.
    pub fn driver(&self, k: usize, j: usize) -> f64 {
        if self.scheme == Scheme::MultiradialCommon {
            self.omegas[j][k]
        } else {
            self.xi[k]
        }
    }

    fn columns(&self) -> Vec<(String, &Vec<f64>)> {
        let mut cols = Vec::new();
        if self.scheme == Scheme::MultiradialCommon {
            for (j, o) in self.omegas.iter().enumerate() {
                cols.push((format!("omega{}", j + 1), o));
            }
        } else {
            cols.push(("xi".to_string(), &self.xi));
        }
        for (j, v) in self.force_points.iter().enumerate() {
            cols.push((format!("v{}", j + 2), v));
        }
        cols
    }

    /// Path of the JSON sidecar belonging to a CSV path.
    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("json")
    }

    /// Writes `step,time,…` rows to `csv_path` and the metadata next to it.
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        let io = |e: std::io::Error| SleError::Numeric(format!("writing {}: {e}", csv_path.display()));
        let file = std::fs::File::create(csv_path).map_err(io)?;
        self.write_csv(file)?;
        let meta = serde_json::to_string_pretty(self).map_err(|e| SleError::Numeric(e.to_string()))?;
        std::fs::write(Self::sidecar_path(csv_path), meta).map_err(io)?;
        Ok(())
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let err = |e: csv::Error| SleError::Numeric(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(writer);
        let cols = self.columns();
        let mut header = vec!["step".to_string(), "time".to_string()];
        header.extend(cols.iter().map(|c| c.0.clone()));
        w.write_record(&header).map_err(err)?;
        for k in 0..=self.steps {
            let mut row = vec![k.to_string(), format!("{:e}", self.time(k))];
            row.extend(cols.iter().map(|c| format!("{:e}", c.1[k])));
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| SleError::Numeric(e.to_string()))?;
        Ok(())
    }

    /// Reads a record written by [`DrivingRecord::write`].
    pub fn read(csv_path: &Path) -> Result<Self> {
        let io = |e: std::io::Error| SleError::Numeric(format!("reading {}: {e}", csv_path.display()));
        let meta = std::fs::read_to_string(Self::sidecar_path(csv_path)).map_err(io)?;
        let mut rec: DrivingRecord = serde_json::from_str(&meta).map_err(|e| SleError::Numeric(e.to_string()))?;
        let err = |e: csv::Error| SleError::Numeric(format!("csv: {e}"));
        let mut r = csv::Reader::from_path(csv_path).map_err(err)?;
        let headers = r.headers().map_err(err)?.clone();
        let mut data: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for row in r.records() {
            let row = row.map_err(err)?;
            for (c, field) in row.iter().enumerate() {
                let v: f64 = field
                    .parse()
                    .map_err(|e| SleError::Numeric(format!("bad number {field}: {e}")))?;
                data[c].push(v);
            }
        }
        for (name, col) in headers.iter().zip(data) {
            if name == "xi" {
                rec.xi = col;
            } else if name.starts_with("omega") {
                rec.omegas.push(col);
            } else if name.starts_with('v') {
                rec.force_points.push(col);
            }
        }
        Ok(rec)
    }
}
