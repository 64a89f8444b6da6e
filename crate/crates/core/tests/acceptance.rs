//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

// θ̆ grids use the rounded values 1.4427 and 14.427 on purpose.
#![allow(clippy::approx_constant)]

use std::process::ExitCode;
use std::time::Instant;

use rascap_core::dist::{
    beta_prime_cdf_closed, beta_prime_pdf, cdf_coefficients, cdf_prefactor, max_order_pdf,
    sample_beta_prime,
};
use rascap_core::figures::{
    closed_form_spread, default_theta_grid, default_xi0_grid, figure_rows, FigureId, FigureOptions,
    DEFAULT_SEED,
};
use rascap_core::mc::{default_q_grid, ks_distance, mc_effective_capacity, queue_tail_exponent};
use rascap_core::specfun::{hyp2f1, ln_beta, ln_gamma};
use rascap_core::units::db_to_linear;
use rascap_core::validate::{run_validation, ValidationGrid};
use rascap_core::{
    BetaPrimeParams, ClosedForm, InterferenceSpec, LinkConfig, McConfig, RandomStream, SinrModel,
};
use rascap_oracle::{hyp2f1_euler, integrate, integrate_semi_infinite};

const GAP_TOL: f64 = 0.05;
const GAP_RUNTIME_S: f64 = 1.0;
const QUAD_REL_TOL: f64 = 1e-8;
const QUAD_RUNTIME_S: f64 = 60.0;
const MC_TRIALS: u64 = 1_000_000;
const MC_Z_LIMIT: f64 = 3.0;
const MC_PASS_FRACTION: f64 = 0.95;
const PREFACTOR_TOL: f64 = 1e-12;
const CDF_ABS_TOL: f64 = 1e-8;
const KS_LIMIT: f64 = 0.002;
const KS_DRAWS: u64 = 1_000_000;
const LN_GAMMA_ABS_TOL: f64 = 1e-12;
const LN_BETA_ABS_TOL: f64 = 1e-12;
const HYP_REL_TOL: f64 = 1e-10;
const EULER_REL_TOL: f64 = 1e-8;
const QUEUE_FRAMES: u64 = 10_000_000;
const QUEUE_THETA: f64 = 0.01;
const QUEUE_REL_TOL: f64 = 0.15;
const CONVERGENCE_RATIO: f64 = 0.05;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn normalized(m: u32, n: u32, k: u32, xi0_db: f64, theta: f64) -> f64 {
    ClosedForm::new(&LinkConfig::new(m, n, k))
        .unwrap()
        .normalized(db_to_linear(xi0_db), theta)
        .unwrap()
}

fn ras_gains() -> Outcome {
    let start = Instant::now();
    let targets = [(0.1, 1.5415), (0.01, 1.3845), (0.001, 1.0880)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (theta, want) in targets {
        let gap = normalized(2, 4, 10, 20.0, theta) - normalized(2, 1, 10, 20.0, theta);
        pass &= (gap - want).abs() <= GAP_TOL;
        parts.push(format!("theta={theta}: {gap:.4} (target {want})"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < GAP_RUNTIME_S;
    outcome(pass, format!("{}; {secs:.3} s", parts.join(", ")))
}

fn closed_vs_quadrature() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let mut count = 0;
    for m in [1, 2, 4] {
        for n in [1, 2, 4] {
            for k in [1, 2, 5, 10] {
                let cf = ClosedForm::new(&LinkConfig::new(m, n, k)).unwrap();
                let p = BetaPrimeParams::new(m, k).unwrap();
                for xi0 in [1.0, 10.0, 100.0] {
                    for tb in [0.1, 1.4427, 14.427] {
                        let scale = xi0 / f64::from(m);
                        let quad = integrate_semi_infinite(
                            |x| (-tb * (scale * x).ln_1p()).exp() * max_order_pdf(x, p, n).unwrap(),
                            1e-12,
                        );
                        let closed = cf.expectation(xi0, tb).unwrap();
                        let err = rel(closed, quad);
                        count += 1;
                        if err > worst {
                            worst = err;
                            worst_at = format!("(M,N,K)=({m},{n},{k}) xi0={xi0} tb={tb}");
                        }
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        count == 324 && worst <= QUAD_REL_TOL && secs < QUAD_RUNTIME_S,
        format!("{count} points, worst relative error {worst:.2e} at {worst_at}; {secs:.1} s"),
    )
}

fn closed_vs_monte_carlo() -> Outcome {
    let grid = ValidationGrid::default();
    let report = run_validation(&grid, &McConfig::new(MC_TRIALS, DEFAULT_SEED), 1.0).unwrap();
    let within = report
        .rows
        .iter()
        .filter(|r| r.z_score.abs() <= MC_Z_LIMIT)
        .count();
    let frac = within as f64 / report.rows.len() as f64;
    let max_z = report
        .rows
        .iter()
        .map(|r| r.z_score.abs())
        .fold(0.0, f64::max);
    outcome(
        report.rows.len() == 27 && frac >= MC_PASS_FRACTION,
        format!(
            "{within}/{} within {MC_Z_LIMIT} sigma, max |z| = {max_z:.2}",
            report.rows.len()
        ),
    )
}

fn approximation_trend() -> Outcome {
    let cfg = LinkConfig::new(2, 4, 10);
    let mc = McConfig::new(MC_TRIALS, DEFAULT_SEED);
    let gaps: Vec<f64> = [0.0, 10.0, 20.0]
        .iter()
        .map(|&zeta_db| {
            let spec = InterferenceSpec::from_db(10.0, zeta_db).unwrap();
            let exact = mc_effective_capacity(&spec, &cfg, 0.01, &mc, SinrModel::Exact).unwrap();
            let approx = mc_effective_capacity(&spec, &cfg, 0.01, &mc, SinrModel::Approx).unwrap();
            (exact.value - approx.value).abs() / cfg.symbols_per_frame()
        })
        .collect();
    outcome(
        gaps[0] > gaps[1] && gaps[1] > gaps[2],
        format!(
            "|exact - approx| at zeta = 0/10/20 dB: {:.4} / {:.4} / {:.4} bits/s/Hz",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn distribution_layer() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();

    let mut worst_pre = 0.0f64;
    let mut coeff_ok = true;
    for m in 1..=8 {
        for k in 1..=8 {
            let p = BetaPrimeParams::new(m, k).unwrap();
            let coeffs = cdf_coefficients(p);
            let dense: Vec<_> = (1..=m + k - 1)
                .map(|power| {
                    power
                        .checked_sub(coeffs.offset() as u32)
                        .and_then(|j| coeffs.coeffs().get(j as usize).cloned())
                        .unwrap_or_default()
                })
                .collect();
            coeff_ok &= dense == rascap_oracle::integers::beta_prime_cdf_numerator(m, k);
            coeff_ok &= dense[..(m - 1) as usize]
                .iter()
                .all(|c| *c == Default::default());
            worst_pre = worst_pre.max((cdf_prefactor(p) - 1.0).abs());
        }
    }
    pass &= coeff_ok && worst_pre <= PREFACTOR_TOL;
    notes.push(format!(
        "low-order coefficients zero and exact: {coeff_ok}, max |prefactor - 1| = {worst_pre:.1e}"
    ));

    let mut worst_cdf = 0.0f64;
    for m in 1..=6 {
        for k in 1..=6 {
            let p = BetaPrimeParams::new(m, k).unwrap();
            for x in [0.01, 0.1, 1.0, 10.0, 100.0] {
                let quad = integrate(|t| beta_prime_pdf(t, p).unwrap(), 0.0, x, 1e-15, 1e-13).value;
                worst_cdf = worst_cdf.max((beta_prime_cdf_closed(x, p).unwrap() - quad).abs());
            }
        }
    }
    pass &= worst_cdf <= CDF_ABS_TOL;
    notes.push(format!("CDF vs quadrature {worst_cdf:.1e}"));

    let p = BetaPrimeParams::new(2, 4).unwrap();
    let mut rng = RandomStream::new(DEFAULT_SEED, 0);
    let mut draws: Vec<f64> = (0..KS_DRAWS)
        .map(|_| sample_beta_prime(p, &mut rng))
        .collect();
    let ks = ks_distance(&mut draws, |x| beta_prime_cdf_closed(x, p).unwrap());
    pass &= ks < KS_LIMIT;
    notes.push(format!("KS(M=2,K=4) = {ks:.5}"));

    outcome(pass, notes.join(", "))
}

fn special_functions() -> Outcome {
    let mut pass = true;
    let mut worst = 0.0f64;
    for (x, want) in [
        (1.0, 0.0),
        (5.0, 3.178_053_830_347_945_8),
        (0.5, 0.572_364_942_924_700_1),
    ] {
        let err = (ln_gamma(x).unwrap() - want).abs();
        pass &= err <= LN_GAMMA_ABS_TOL;
        worst = worst.max(err);
    }
    for (a, b, want) in [
        (1.0, 1.0, 0.0),
        (2.0, 3.0, -2.484_906_649_788_000_4),
        (2.0, 10.0, (1.0f64 / 110.0).ln()),
    ] {
        let err = (ln_beta(a, b).unwrap() - want).abs();
        pass &= err <= LN_BETA_ABS_TOL;
        worst = worst.max(err);
    }
    let mut worst_hyp = 0.0f64;
    for (a, b, c, z, want) in [
        (0.7, 2.0, 3.5, 0.0, 1.0),
        (1.0, 1.0, 2.0, 0.5, 2.0 * std::f64::consts::LN_2),
        (2.0, 3.0, 3.0, -1.0, 0.25),
    ] {
        let err = rel(hyp2f1(a, b, c, z).unwrap(), want);
        pass &= err <= HYP_REL_TOL;
        worst_hyp = worst_hyp.max(err);
    }
    let (a, b, c, z) = (1.4427, 4.0, 14.0, -49.0);
    let euler = rel(hyp2f1(a, b, c, z).unwrap(), hyp2f1_euler(a, b, c, z, 1e-13));
    pass &= euler <= EULER_REL_TOL;
    outcome(
        pass,
        format!(
            "ln_gamma/ln_beta max abs error {worst:.1e}, identities max rel error {worst_hyp:.1e}, z=-49 vs Euler integral {euler:.1e}"
        ),
    )
}

fn queue_semantics() -> Outcome {
    let cfg = LinkConfig::new(2, 4, 10);
    let spec = InterferenceSpec::from_db(10.0, 10.0).unwrap();
    let arrival = ClosedForm::new(&cfg)
        .unwrap()
        .effective_capacity(spec.xi0, QUEUE_THETA)
        .unwrap();
    let grid = default_q_grid(QUEUE_THETA, 200);
    let mc = McConfig::new(QUEUE_FRAMES, DEFAULT_SEED);
    match queue_tail_exponent(arrival, &spec, &cfg, QUEUE_THETA, &mc, &grid) {
        Ok(r) => match (r.slope, r.relative_error()) {
            (Some(slope), Some(err)) => outcome(
                err <= QUEUE_REL_TOL,
                format!(
                    "slope {slope:.5} vs {QUEUE_THETA} ({:.1}% off) over {QUEUE_FRAMES} frames ({} after warm-up)",
                    100.0 * err,
                    r.frames
                ),
            ),
            _ => outcome(false, "too few tail points to fit a slope".into()),
        },
        Err(e) => outcome(false, e.to_string()),
    }
}

fn monotonicity() -> Outcome {
    let xi0_grid = default_xi0_grid();
    let theta_grid = default_theta_grid();
    let mut violations = Vec::new();
    for m in [2, 4] {
        for n in [1, 2, 4] {
            for k in [2, 5, 10, 20] {
                let cf = ClosedForm::new(&LinkConfig::new(m, n, k)).unwrap();
                for theta in [0.001, 0.01, 0.1] {
                    let v: Vec<f64> = xi0_grid
                        .iter()
                        .map(|&x| cf.normalized(db_to_linear(x), theta).unwrap())
                        .collect();
                    if !v.windows(2).all(|w| w[1] > w[0]) {
                        violations.push(format!("xi0 ({m},{n},{k}) theta={theta}"));
                    }
                }
                for xi0_db in [0.0, 10.0, 20.0] {
                    let v: Vec<f64> = theta_grid
                        .iter()
                        .map(|&t| cf.normalized(db_to_linear(xi0_db), t).unwrap())
                        .collect();
                    if !v.windows(2).all(|w| w[1] < w[0]) {
                        violations.push(format!("theta ({m},{n},{k}) xi0={xi0_db} dB"));
                    }
                }
            }
        }
    }
    for &xi0_db in &xi0_grid {
        for theta in [0.001, 0.01, 0.1] {
            for m in [2, 4] {
                for n in [1, 2, 4] {
                    let by_k: Vec<f64> = [2, 5, 10, 20]
                        .iter()
                        .map(|&k| normalized(m, n, k, xi0_db, theta))
                        .collect();
                    if !by_k.windows(2).all(|w| w[1] < w[0]) {
                        violations.push(format!("K at ({m},{n}) xi0={xi0_db} theta={theta}"));
                    }
                }
                for k in [2, 5, 10] {
                    let by_n: Vec<f64> = [1, 2, 4]
                        .iter()
                        .map(|&n| normalized(m, n, k, xi0_db, theta))
                        .collect();
                    if !by_n.windows(2).all(|w| w[1] > w[0]) {
                        violations.push(format!("N at ({m},{k}) xi0={xi0_db} theta={theta}"));
                    }
                }
            }
        }
    }

    let opts = FigureOptions {
        mc_model: None,
        ..FigureOptions::default()
    };
    let rows = figure_rows(FigureId::Fig8, &opts).unwrap();
    let (lo, hi) = (theta_grid[0], theta_grid[theta_grid.len() - 1]);
    let spread_lo = closed_form_spread(&rows, lo).unwrap();
    let spread_hi = closed_form_spread(&rows, hi).unwrap();
    let ratio = spread_hi / spread_lo;
    let converges = ratio < CONVERGENCE_RATIO;

    outcome(
        violations.is_empty() && converges,
        format!(
            "{} ordering violations{}; K-spread at theta={hi} is {spread_hi:.4} vs {spread_lo:.4} at theta={lo} (ratio {:.1}%, limit {:.0}%)",
            violations.len(),
            violations
                .first()
                .map(|v| format!(" (first: {v})"))
                .unwrap_or_default(),
            100.0 * ratio,
            100.0 * CONVERGENCE_RATIO
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("RAS over MISO gains at 20 dB", ras_gains),
        ("closed form vs quadrature", closed_vs_quadrature),
        ("closed form vs Monte Carlo", closed_vs_monte_carlo),
        ("exact vs approximate SINR trend", approximation_trend),
        ("distribution layer", distribution_layer),
        ("special functions", special_functions),
        ("queue tail exponent", queue_semantics),
        ("monotonicity and theta convergence", monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
