//! Closed form vs Monte Carlo on a grid of operating points.

use std::io::Write;

use rayon::prelude::*;

use crate::effcap::{make_qos, ClosedForm, InterferenceSpec, LinkConfig};
use crate::error::{Error, Result};
use crate::mc::{mc_effective_capacity, McConfig, SinrModel};

pub const CSV_HEADER: [&str; 7] = [
    "xi0_db",
    "k",
    "theta",
    "closed_form",
    "mc_value",
    "mc_stderr",
    "z_score",
];

/// Points must lie within this many standard errors.
pub const Z_LIMIT: f64 = 3.0;

/// Fraction of points that must lie within [`Z_LIMIT`].
pub const PASS_FRACTION: f64 = 0.95;

/// Cartesian grid of (ξ₀, K, θ) around a fixed link.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationGrid {
    pub xi0_db: Vec<f64>,
    pub k: Vec<u32>,
    pub theta: Vec<f64>,
    pub m: u32,
    pub n: u32,
    pub rc: f64,
    pub zeta_db: f64,
    pub model: SinrModel,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self {
            xi0_db: vec![0.0, 10.0, 20.0],
            k: vec![2, 5, 10],
            theta: vec![0.001, 0.01, 0.1],
            m: 2,
            n: 4,
            rc: 1.0,
            zeta_db: 10.0,
            model: SinrModel::Approx,
        }
    }
}

impl ValidationGrid {
    pub fn len(&self) -> usize {
        self.xi0_db.len() * self.k.len() * self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn points(&self) -> Vec<(f64, u32, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &xi0_db in &self.xi0_db {
            for &k in &self.k {
                for &theta in &self.theta {
                    out.push((xi0_db, k, theta));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationRow {
    pub xi0_db: f64,
    pub k: u32,
    pub theta: f64,
    /// Normalized effective capacities, bits/s/Hz.
    pub closed_form: f64,
    pub mc_value: f64,
    pub mc_stderr: f64,
    pub z_score: f64,
}

impl ValidationRow {
    pub fn within(&self) -> bool {
        self.z_score.abs() <= Z_LIMIT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn fraction_within(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.within()).count() as f64 / self.rows.len() as f64
    }

    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.fraction_within() >= PASS_FRACTION
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(CSV_HEADER)?;
        for r in &self.rows {
            writer.write_record([
                r.xi0_db.to_string(),
                r.k.to_string(),
                r.theta.to_string(),
                r.closed_form.to_string(),
                r.mc_value.to_string(),
                r.mc_stderr.to_string(),
                r.z_score.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Runs every grid point. `theta_breve_scale` multiplies θ̆ in the closed
/// form only; anything other than 1 is a fault injection for testing the
/// harness itself.
pub fn run_validation(
    grid: &ValidationGrid,
    mc: &McConfig,
    theta_breve_scale: f64,
) -> Result<ValidationReport> {
    if grid.is_empty() {
        return Err(Error::Config("validation grid is empty".into()));
    }
    if !(theta_breve_scale > 0.0 && theta_breve_scale.is_finite()) {
        return Err(Error::Config("theta_breve scale must be positive".into()));
    }
    mc.validate()?;
    let rows: Result<Vec<ValidationRow>> = grid
        .points()
        .into_par_iter()
        .map(|(xi0_db, k, theta)| {
            let cfg = LinkConfig::new(grid.m, grid.n, k).with_rc(grid.rc);
            let spec = InterferenceSpec::from_db(xi0_db, grid.zeta_db)?;
            let closed = ClosedForm::new(&cfg)?;
            let qos = make_qos(theta, &cfg)?;
            let ln_e = closed.ln_expectation(spec.xi0, qos.theta_breve * theta_breve_scale)?;
            let symbols = cfg.symbols_per_frame();
            let closed_form = -ln_e / theta / symbols;
            let est = mc_effective_capacity(&spec, &cfg, theta, mc, grid.model)?.scaled(symbols);
            Ok(ValidationRow {
                xi0_db,
                k,
                theta,
                closed_form,
                mc_value: est.value,
                mc_stderr: est.stderr,
                z_score: est.z_score(closed_form),
            })
        })
        .collect();
    Ok(ValidationReport { rows: rows? })
}
