//! Scalar special functions: log-Gamma, log-Beta, the regularized lower
//! incomplete Gamma function and the Gauss hypergeometric function ₂F₁.

use crate::error::{domain, Error, Result};

/// Relative size below which a series term counts as negligible.
pub const SERIES_TOL: f64 = 1e-15;

/// Consecutive negligible terms required before a series is declared converged.
pub const SERIES_QUIET_TERMS: usize = 3;

/// Hard cap on the number of ₂F₁ series terms.
pub const MAX_SERIES_TERMS: usize = 100_000;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;

// Stirling shift point; below it the recurrence Γ(x+1) = xΓ(x) moves x up.
const STIRLING_MIN: f64 = 15.0;

// B_{2n} / (2n (2n-1)) for n = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("x = {x}, need x > 0")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    let mut x = x;
    let mut shift = 1.0;
    let mut ln_shift = 0.0;
    while x < STIRLING_MIN {
        shift *= x;
        x += 1.0;
        if shift > 1e280 {
            ln_shift += shift.ln();
            shift = 1.0;
        }
    }
    ln_shift += shift.ln();
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in STIRLING {
        series += c * power;
        power *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series - ln_shift
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b).
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(
            "ln_beta",
            format!("a = {a}, b = {b}, need a, b > 0"),
        ));
    }
    Ok(ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b))
}

/// Regularized lower incomplete Gamma function P(a, x).
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(domain("gamma_p", format!("a = {a}, x = {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let ln_prefix = a * x.ln() - x - ln_gamma_pos(a);
    if x < a + 1.0 {
        // Σ x^n / (a (a+1) … (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..MAX_SERIES_TERMS {
            term *= x / (a + n as f64);
            sum += term;
            if term.abs() < sum.abs() * SERIES_TOL {
                return Ok((sum.ln() + ln_prefix).exp().min(1.0));
            }
        }
        Err(Error::NoConvergence {
            func: "gamma_p",
            iterations: MAX_SERIES_TERMS,
        })
    } else {
        // Modified Lentz on the continued fraction for Q(a, x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_SERIES_TERMS {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < SERIES_TOL {
                let q = (h.ln() + ln_prefix).exp();
                return Ok((1.0 - q).max(0.0));
            }
        }
        Err(Error::NoConvergence {
            func: "gamma_p",
            iterations: MAX_SERIES_TERMS,
        })
    }
}

/// A real number held as `mantissa · e^ln_scale`, used where intermediate
/// ₂F₁ values overflow `f64` even though the final product does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * self.ln_scale.exp()
    }

    /// Natural log of the value, or `None` if it is not positive.
    pub fn ln(self) -> Option<f64> {
        (self.mantissa > 0.0).then(|| self.mantissa.ln() + self.ln_scale)
    }
}

const RESCALE: f64 = 1e200;

/// Gauss series Σ (a)_n (b)_n / ((c)_n n!) zⁿ for |z| < 1.
fn gauss_series(a: f64, b: f64, c: f64, z: f64) -> Result<Scaled> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    let mut quiet = 0;
    for n in 0..MAX_SERIES_TERMS {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        if term == 0.0 {
            return Ok(Scaled {
                mantissa: sum,
                ln_scale,
            });
        }
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs() {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                return Ok(Scaled {
                    mantissa: sum,
                    ln_scale,
                });
            }
        } else {
            quiet = 0;
        }
        if sum.abs() > RESCALE || term.abs() > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    Err(Error::NoConvergence {
        func: "hyp2f1",
        iterations: MAX_SERIES_TERMS,
    })
}

/// ₂F₁(a, b; c; z) in scaled form, for c > 0 and z < 1.
///
/// * `z < 0`: Pfaff transformation to `w = z/(z-1) ∈ (0, 1)`, choosing the
///   variant whose series has `a' + b' − c ≤ 0` so terms decay from early on.
/// * `0 ≤ z < 1`: direct series, after an Euler transformation when
///   `a + b − c > 0`. The `1 − z` connection formula is not used: in the
///   effective-capacity sum `c − a − b` is always an integer, its degenerate
///   case.
pub fn hyp2f1_scaled(a: f64, b: f64, c: f64, z: f64) -> Result<Scaled> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(domain("hyp2f1", "non-finite argument"));
    }
    if !(c > 0.0) {
        return Err(domain("hyp2f1", format!("c = {c}, need c > 0")));
    }
    if !(z < 1.0) {
        return Err(domain("hyp2f1", format!("z = {z}, need z < 1")));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(Scaled {
            mantissa: 1.0,
            ln_scale: 0.0,
        });
    }
    let ln_one_minus_z = (-z).ln_1p();
    let (prefactor, series) = if z < 0.0 {
        let w = z / (z - 1.0);
        if a <= b {
            (-a * ln_one_minus_z, gauss_series(a, c - b, c, w)?)
        } else {
            (-b * ln_one_minus_z, gauss_series(c - a, b, c, w)?)
        }
    } else if a + b - c > 0.0 {
        (
            (c - a - b) * ln_one_minus_z,
            gauss_series(c - a, c - b, c, z)?,
        )
    } else {
        (0.0, gauss_series(a, b, c, z)?)
    };
    Ok(Scaled {
        mantissa: series.mantissa,
        ln_scale: series.ln_scale + prefactor,
    })
}

/// ₂F₁(a, b; c; z) for c > 0, z < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_scaled(a, b, c, z).map(Scaled::value)
}

/// ln ₂F₁(a, b; c; z); fails if the value is not positive.
pub fn ln_hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_scaled(a, b, c, z)?
        .ln()
        .ok_or_else(|| domain("ln_hyp2f1", "function value is not positive"))
}
