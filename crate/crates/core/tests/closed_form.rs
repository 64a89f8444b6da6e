// θ̆ grids use the rounded values 1.4427 and 14.427 on purpose.
#![allow(clippy::approx_constant)]

use rascap_core::dist::{beta_prime_cdf_closed, beta_prime_pdf, max_order_pdf};
use rascap_core::figures::{default_theta_grid, default_xi0_grid};
use rascap_core::mc::mc_mean_rate;
use rascap_core::units::db_to_linear;
use rascap_core::{
    expectation_term, make_qos, BetaPrimeParams, ClosedForm, InterferenceSpec, LinkConfig,
    McConfig, RandomStream, SinrModel,
};
use rascap_oracle::integrate_semi_infinite;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn quadrature_expectation(m: u32, n: u32, k: u32, xi0: f64, theta_breve: f64) -> f64 {
    let p = BetaPrimeParams::new(m, k).unwrap();
    let scale = xi0 / f64::from(m);
    integrate_semi_infinite(
        |x| (-theta_breve * (scale * x).ln_1p()).exp() * max_order_pdf(x, p, n).unwrap(),
        1e-12,
    )
}

#[test]
fn expectation_matches_quadrature_at_ten_db() {
    let cfg = LinkConfig::new(2, 4, 10);
    let qos = make_qos(0.01, &cfg).unwrap();
    let spec = InterferenceSpec::from_db(10.0, 10.0).unwrap();
    let closed = expectation_term(&spec, &cfg, &qos).unwrap();
    let quad = quadrature_expectation(2, 4, 10, spec.xi0, qos.theta_breve);
    assert!(rel(closed, quad) <= 1e-8, "{closed} vs {quad}");
}

#[test]
fn degenerate_link_expectation_is_one_half() {
    let cf = ClosedForm::new(&LinkConfig::new(1, 1, 1)).unwrap();
    let e = cf.expectation(1.0, 1.0).unwrap();
    assert!((e - 0.5).abs() <= 1e-12, "{e}");
}

#[test]
fn single_antenna_matches_beta_prime_quadrature() {
    // N = 1 checked against the Beta-prime density directly, bypassing the
    // order-statistic machinery.
    for (m, k) in [(1, 1), (2, 3), (2, 10), (4, 5)] {
        let p = BetaPrimeParams::new(m, k).unwrap();
        let cf = ClosedForm::new(&LinkConfig::new(m, 1, k)).unwrap();
        for xi0 in [0.5, 10.0, 1000.0] {
            for tb in [0.1, 1.4427, 14.427] {
                let scale = xi0 / f64::from(m);
                let quad = integrate_semi_infinite(
                    |x| (-tb * (scale * x).ln_1p()).exp() * beta_prime_pdf(x, p).unwrap(),
                    1e-13,
                );
                let closed = cf.expectation(xi0, tb).unwrap();
                assert!(
                    rel(closed, quad) <= 1e-9,
                    "({m},{k}) xi0={xi0} tb={tb}: {closed} vs {quad}"
                );
            }
        }
    }
}

#[test]
fn max_order_density_is_n_pdf_cdf_power() {
    let mut rng = RandomStream::new(99, 0);
    for m in 1..=3 {
        for k in 1..=3 {
            let p = BetaPrimeParams::new(m, k).unwrap();
            for n in 1..=4 {
                for _ in 0..1000 {
                    let x = (20.0 * rng.uniform() - 10.0).exp();
                    let direct = f64::from(n)
                        * beta_prime_pdf(x, p).unwrap()
                        * beta_prime_cdf_closed(x, p).unwrap().powi(n as i32 - 1);
                    let got = max_order_pdf(x, p, n).unwrap();
                    if direct < 1e-290 {
                        continue;
                    }
                    assert!(
                        rel(got, direct) <= 1e-10,
                        "({m},{k},{n}) x={x}: {got} vs {direct}"
                    );
                }
            }
        }
    }
}

#[test]
fn expectation_in_unit_interval() {
    for (m, n, k) in [(1, 1, 1), (2, 4, 10), (4, 4, 10), (8, 2, 3)] {
        let cf = ClosedForm::new(&LinkConfig::new(m, n, k)).unwrap();
        for xi0_db in [-5.0, 10.0, 30.0] {
            for tb in [1e-3, 1.0, 100.0] {
                let e = cf.expectation(db_to_linear(xi0_db), tb).unwrap();
                assert!(e > 0.0 && e <= 1.0, "{e}");
            }
        }
    }
}

fn ec(m: u32, n: u32, k: u32, xi0_db: f64, theta: f64) -> f64 {
    ClosedForm::new(&LinkConfig::new(m, n, k))
        .unwrap()
        .normalized(db_to_linear(xi0_db), theta)
        .unwrap()
}

#[test]
fn increasing_in_xi0_on_twenty_point_grid() {
    let grid: Vec<f64> = (0..20).map(|i| -5.0 + 35.0 * f64::from(i) / 19.0).collect();
    for (m, n, k) in [(2, 4, 2), (2, 4, 10), (2, 1, 10), (4, 2, 5)] {
        for theta in [0.001, 0.01, 0.1] {
            let v: Vec<f64> = grid.iter().map(|&x| ec(m, n, k, x, theta)).collect();
            assert!(
                v.windows(2).all(|w| w[1] > w[0]),
                "({m},{n},{k}) theta={theta}: {v:?}"
            );
        }
    }
}

#[test]
fn decreasing_in_k_and_increasing_in_n() {
    for xi0_db in default_xi0_grid() {
        for theta in [0.001, 0.01, 0.1] {
            let by_k: Vec<f64> = [2, 5, 10]
                .iter()
                .map(|&k| ec(2, 4, k, xi0_db, theta))
                .collect();
            assert!(
                by_k[0] > by_k[1] && by_k[1] > by_k[2],
                "{xi0_db} dB: {by_k:?}"
            );
            assert!(ec(2, 4, 10, xi0_db, theta) > ec(2, 1, 10, xi0_db, theta));
        }
    }
}

#[test]
fn decreasing_in_theta() {
    let cf = ClosedForm::new(&LinkConfig::new(2, 4, 10)).unwrap();
    let v: Vec<f64> = default_theta_grid()
        .iter()
        .map(|&t| cf.normalized(10.0, t).unwrap())
        .collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
}

#[test]
fn small_theta_approaches_mean_rate() {
    let cfg = LinkConfig::new(2, 4, 10);
    let spec = InterferenceSpec::from_db(10.0, 10.0).unwrap();
    let closed = ClosedForm::new(&cfg)
        .unwrap()
        .effective_capacity(spec.xi0, 1e-6)
        .unwrap();
    let mean = mc_mean_rate(&spec, &cfg, &McConfig::new(1_000_000, 8), SinrModel::Approx).unwrap();
    assert!(rel(closed, mean.value) <= 0.01, "{closed} vs {mean:?}");
    assert!(closed < mean.value + 3.0 * mean.stderr);
}
