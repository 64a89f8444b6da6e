//! Parameter sweeps behind the `figure` command and their CSV output.
//!
//! Every figure writes the same five columns,
//! `curve_label,axis_value,closed_form,mc_value,mc_stderr`. Effective
//! capacities are normalized (bits/s/Hz). For the interference CDF figure
//! `closed_form` is the fitted Gamma CDF, `mc_value` the empirical CDF and
//! `mc_stderr` its binomial standard error.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dist::fit_gamma_moments;
use crate::effcap::{ClosedForm, InterferenceSpec, LinkConfig};
use crate::error::{domain, Error, Result};
use crate::mc::{mc_effective_capacity, mc_weighted_gamma_cdf, McConfig, SinrModel};

pub const CSV_HEADER: [&str; 5] = [
    "curve_label",
    "axis_value",
    "closed_form",
    "mc_value",
    "mc_stderr",
];

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_C0DE;

/// Trials per Monte Carlo point.
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Grid points on each interference CDF curve.
pub const CDF_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Xi0Db,
    Theta,
}

/// One operating point, with SIR and INR in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub m: u32,
    pub n: u32,
    pub k: u32,
    pub rc: f64,
    pub bandwidth_hz: f64,
    pub frame_s: f64,
    pub zeta_db: f64,
    pub xi0_db: f64,
    pub theta: f64,
}

impl PointParams {
    /// The 2×4 link with 10 interferers at ξ₀ = ζ = 10 dB and θ = 0.01.
    pub fn baseline() -> Self {
        Self {
            m: 2,
            n: 4,
            k: 10,
            rc: 1.0,
            bandwidth_hz: LinkConfig::DEFAULT_BANDWIDTH_HZ,
            frame_s: LinkConfig::DEFAULT_FRAME_S,
            zeta_db: 10.0,
            xi0_db: 10.0,
            theta: 0.01,
        }
    }

    pub fn link(&self) -> LinkConfig {
        LinkConfig::new(self.m, self.n, self.k)
            .with_rc(self.rc)
            .with_timing(self.bandwidth_hz, self.frame_s)
    }

    pub fn interference(&self) -> Result<InterferenceSpec> {
        InterferenceSpec::from_db(self.xi0_db, self.zeta_db)
    }

    pub fn at(&self, axis: Axis, value: f64) -> Self {
        match axis {
            Axis::Xi0Db => Self {
                xi0_db: value,
                ..*self
            },
            Axis::Theta => Self {
                theta: value,
                ..*self
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Closed,
    McExact,
    McApprox,
}

/// One curve: a parameter record swept along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub label: String,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub fixed: PointParams,
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config(format!(
                "curve '{}' has an empty grid",
                self.label
            )));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) || self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "curve '{}' grid must be strictly increasing",
                self.label
            )));
        }
        self.fixed.link().validate()
    }

    fn mc_models(&self) -> Vec<SinrModel> {
        let mut models = Vec::new();
        if self.outputs.contains(&Output::McExact) {
            models.push(SinrModel::Exact);
        }
        if self.outputs.contains(&Output::McApprox) {
            models.push(SinrModel::Approx);
        }
        models
    }
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub curve_label: String,
    pub axis_value: f64,
    pub closed_form: Option<f64>,
    pub mc_value: Option<f64>,
    pub mc_stderr: Option<f64>,
}

impl Row {
    fn record(&self) -> [String; 5] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.curve_label.clone(),
            self.axis_value.to_string(),
            opt(self.closed_form),
            opt(self.mc_value),
            opt(self.mc_stderr),
        ]
    }
}

/// Evaluates one curve. Grid points run in parallel; rows come back in grid
/// order. When both simulation models are requested each gets its own rows,
/// labelled `"<label> [exact]"` and `"<label> [approx]"`.
pub fn run_sweep(spec: &SweepSpec, mc: &McConfig) -> Result<Vec<Row>> {
    spec.validate()?;
    let closed = spec
        .outputs
        .contains(&Output::Closed)
        .then(|| ClosedForm::new(&spec.fixed.link()))
        .transpose()?;
    let models = spec.mc_models();
    let variants: Vec<(String, Option<SinrModel>)> = match models.len() {
        0 => vec![(spec.label.clone(), None)],
        1 => vec![(spec.label.clone(), Some(models[0]))],
        _ => models
            .iter()
            .map(|m| (format!("{} [{}]", spec.label, m.name()), Some(*m)))
            .collect(),
    };
    let symbols = spec.fixed.link().symbols_per_frame();

    let mut rows = Vec::new();
    for (label, model) in variants {
        let curve: Result<Vec<Row>> = spec
            .grid
            .par_iter()
            .map(|&value| {
                let point = spec.fixed.at(spec.axis, value);
                let interference = point.interference()?;
                let closed_form = closed
                    .as_ref()
                    .map(|cf| cf.normalized(interference.xi0, point.theta))
                    .transpose()?;
                let est = model
                    .map(|m| {
                        mc_effective_capacity(&interference, &point.link(), point.theta, mc, m)
                    })
                    .transpose()?
                    .map(|e| e.scaled(symbols));
                Ok(Row {
                    curve_label: label.clone(),
                    axis_value: value,
                    closed_form,
                    mc_value: est.map(|e| e.value),
                    mc_stderr: est.map(|e| e.stderr),
                })
            })
            .collect();
        rows.extend(curve?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure '{s}'")))
    }
}

/// ξ₀ from −5 to 30 dB in 1 dB steps.
pub fn default_xi0_grid() -> Vec<f64> {
    (-5..=30).map(f64::from).collect()
}

/// 25 log-spaced θ values from 1e-4 to 1.
pub fn default_theta_grid() -> Vec<f64> {
    (0..25).map(|i| 10f64.powf(-4.0 + i as f64 / 6.0)).collect()
}

/// Interferer power profiles (linear ζ_k) of the interference CDF figure.
pub fn default_cdf_profiles() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 4.0],
        vec![1.0, 4.0, 9.0],
        vec![1.0, 4.0, 9.0, 16.0],
    ]
}

/// Knobs shared by every figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub mc: McConfig,
    /// Simulation model for effective-capacity figures; `None` skips Monte
    /// Carlo entirely.
    pub mc_model: Option<SinrModel>,
    pub zeta_db: Option<f64>,
    pub xi0_grid: Option<Vec<f64>>,
    pub theta_grid: Option<Vec<f64>>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            mc: McConfig::new(DEFAULT_TRIALS, DEFAULT_SEED),
            mc_model: Some(SinrModel::Exact),
            zeta_db: None,
            xi0_grid: None,
            theta_grid: None,
        }
    }
}

/// Curve definitions of an effective-capacity figure. Empty for the
/// interference CDF figure, which is not a sweep.
pub fn figure_sweeps(id: FigureId, opts: &FigureOptions) -> Vec<SweepSpec> {
    let mut outputs = vec![Output::Closed];
    match opts.mc_model {
        Some(SinrModel::Exact) => outputs.push(Output::McExact),
        Some(SinrModel::Approx) => outputs.push(Output::McApprox),
        None => {}
    }
    let xi0_grid = opts.xi0_grid.clone().unwrap_or_else(default_xi0_grid);
    let theta_grid = opts.theta_grid.clone().unwrap_or_else(default_theta_grid);
    let base = PointParams::baseline();
    let zeta = |default: f64| opts.zeta_db.unwrap_or(default);
    let sweep = |label: String, axis: Axis, fixed: PointParams| SweepSpec {
        label,
        axis,
        grid: match axis {
            Axis::Xi0Db => xi0_grid.clone(),
            Axis::Theta => theta_grid.clone(),
        },
        fixed,
        outputs: outputs.clone(),
    };

    match id {
        FigureId::Fig2 => Vec::new(),
        FigureId::Fig3 | FigureId::Fig4 | FigureId::Fig5 => {
            let zeta_db = zeta(match id {
                FigureId::Fig3 => 0.0,
                FigureId::Fig4 => 10.0,
                _ => 20.0,
            });
            [2, 5, 10]
                .into_iter()
                .map(|k| {
                    sweep(
                        format!("K={k}"),
                        Axis::Xi0Db,
                        PointParams { k, zeta_db, ..base },
                    )
                })
                .collect()
        }
        FigureId::Fig6 => {
            let mut curves = Vec::new();
            for m in [2, 4] {
                for n in [1, 2, 4] {
                    let kind = if n == 1 { "MISO" } else { "RAS" };
                    curves.push(sweep(
                        format!("{kind} {m}x{n}"),
                        Axis::Xi0Db,
                        PointParams {
                            m,
                            n,
                            zeta_db: zeta(10.0),
                            ..base
                        },
                    ));
                }
            }
            curves
        }
        FigureId::Fig7 => {
            let mut curves = Vec::new();
            for theta in [0.1, 0.01, 0.001] {
                for (kind, n) in [("RAS 2x4", 4), ("MISO 2x1", 1)] {
                    curves.push(sweep(
                        format!("{kind} theta={theta}"),
                        Axis::Xi0Db,
                        PointParams {
                            n,
                            theta,
                            zeta_db: zeta(10.0),
                            ..base
                        },
                    ));
                }
            }
            curves
        }
        FigureId::Fig8 => [5, 10, 20]
            .into_iter()
            .map(|k| {
                sweep(
                    format!("K={k}"),
                    Axis::Theta,
                    PointParams {
                        k,
                        zeta_db: zeta(10.0),
                        ..base
                    },
                )
            })
            .collect(),
    }
}

/// Simulated vs moment-fitted CDF of the weighted interference sum.
pub fn interference_cdf_rows(profiles: &[Vec<f64>], mc: &McConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for zetas in profiles {
        let fit = fit_gamma_moments(zetas)?;
        let table = mc_weighted_gamma_cdf(zetas, mc, CDF_POINTS)?;
        let n = table.trials as f64;
        let label = format!(
            "K={} zeta=[{}]",
            zetas.len(),
            zetas
                .iter()
                .map(|z| z.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        for (&x, &f) in table.grid.iter().zip(&table.cdf) {
            rows.push(Row {
                curve_label: label.clone(),
                axis_value: x,
                closed_form: Some(fit.cdf(x)),
                mc_value: Some(f),
                mc_stderr: Some((f * (1.0 - f) / n).sqrt()),
            });
        }
    }
    Ok(rows)
}

/// All rows of a figure, in curve then grid order.
pub fn figure_rows(id: FigureId, opts: &FigureOptions) -> Result<Vec<Row>> {
    if id == FigureId::Fig2 {
        return interference_cdf_rows(&default_cdf_profiles(), &opts.mc);
    }
    let mut rows = Vec::new();
    for spec in figure_sweeps(id, opts) {
        rows.extend(run_sweep(&spec, &opts.mc)?);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(row.record())?;
    }
    writer.flush()?;
    Ok(())
}

/// Largest minus smallest closed-form value across curves at one axis value.
pub fn closed_form_spread(rows: &[Row], axis_value: f64) -> Result<f64> {
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| (r.axis_value - axis_value).abs() <= 1e-12 * axis_value.abs().max(1.0))
        .filter_map(|r| r.closed_form)
        .collect();
    if values.len() < 2 {
        return Err(domain(
            "closed_form_spread",
            format!("fewer than two curves at {axis_value}"),
        ));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}
