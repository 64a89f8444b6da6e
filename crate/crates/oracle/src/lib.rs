//! Reference computations that the rascap test suites check the library
//! against.
//!
//! Nothing in here calls into `rascap-core`: every routine is a separate
//! numerical route (quadrature, brute-force integer arithmetic) so a bug in
//! the library cannot silently propagate into its own expected values.

pub mod integers;
pub mod quad;

pub use quad::{integrate, integrate_semi_infinite, Quadrature};

/// Gauss hypergeometric function by quadrature of its Euler integral,
///
/// `2F1(a,b;c;z) = ∫ t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt / ∫ t^(b-1) (1-t)^(c-b-1) dt`
///
/// over `[0, 1]`. Both integrals are computed numerically, so no Gamma
/// function evaluation is involved. Requires `b >= 1`, `c - b >= 1` (smooth
/// endpoints) and `z < 1`.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64, rel_tol: f64) -> f64 {
    assert!(b >= 1.0 && c - b >= 1.0 && z < 1.0, "outside oracle domain");
    // Work with a log-shifted kernel so very large exponents stay finite.
    let ln_kernel = |t: f64| (b - 1.0) * t.ln() + (c - b - 1.0) * (-t).ln_1p();
    // Locate the kernel mode to centre the scale.
    let mode = if b + (c - b) > 2.0 {
        (b - 1.0) / (c - 2.0)
    } else {
        0.5
    };
    let shift = ln_kernel(mode.clamp(1e-12, 1.0 - 1e-12));
    let breaks = [0.0, 0.02, 0.1, 0.25, 0.5, 0.75, 0.9, 0.98, 1.0];
    let weight = |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        (ln_kernel(t) - shift).exp()
    };
    let num = integrate_pieces(
        |t| weight(t) * (-a * (-z * t).ln_1p()).exp(),
        &breaks,
        rel_tol,
    );
    let den = integrate_pieces(weight, &breaks, rel_tol);
    num / den
}

/// Integrates over consecutive break points and sums the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64) -> f64 {
    breaks
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], 0.0, rel_tol).value)
        .sum()
}
