//! The Beta-prime law of the per-antenna SINR ratio
//! `Ω = Σ|h_m|² / Σ|g_k|²` and the law of the maximum over `N` antennas.
//!
//! CDF and order-statistic coefficients are exact integers ([`BigUint`]);
//! they are only turned into floating point, in log form, when a density or
//! expectation is evaluated.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::rng::RandomStream;
use crate::specfun::{gamma_p, ln_beta, ln_gamma};

/// Shapes of the Beta-prime law: `m` transmit antennas (numerator Gamma
/// shape) and `k` equal-power interferers (denominator Gamma shape).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BetaPrimeParams {
    m: u32,
    k: u32,
}

impl BetaPrimeParams {
    pub fn new(m: u32, k: u32) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(domain(
                "BetaPrimeParams",
                format!("m = {m}, k = {k}, both must be >= 1"),
            ));
        }
        Ok(Self { m, k })
    }

    pub fn m(self) -> u32 {
        self.m
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// `m + k - 1`, the degree of the CDF numerator polynomial.
    pub fn degree(self) -> u32 {
        self.m + self.k - 1
    }

    pub fn ln_beta(self) -> f64 {
        ln_beta(self.m as f64, self.k as f64).expect("shapes are positive")
    }
}

/// Exact nonnegative integer coefficients; entry `j` multiplies
/// `x^(offset + j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    offset: usize,
    coeffs: Vec<BigUint>,
}

impl CoefficientVector {
    pub fn new(offset: usize, coeffs: Vec<BigUint>) -> Self {
        Self { offset, coeffs }
    }

    /// The multiplicative identity `[1]` at offset 0.
    pub fn identity() -> Self {
        Self::new(0, vec![BigUint::one()])
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Discrete convolution, i.e. the product of the two polynomials.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = vec![BigUint::zero(); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.offset + other.offset, out)
    }

    /// Natural logs of the coefficients; zero entries map to `-inf`.
    pub fn ln_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(ln_biguint).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }
}

/// ln of an arbitrary-size integer, exact to f64 rounding.
pub fn ln_biguint(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// CDF numerator coefficients `p_1 … p_{m+k-1}` (offset 1).
///
/// For `j ≤ m-1` the coefficient is `C(m+k-1, j) + (-1)^(j+1) ∏_{i=1}^{j} (i-m-k) / j!`,
/// otherwise `C(m+k-1, j)`. Both branches are evaluated as written with
/// signed big integers; the low-order ones cancel to zero exactly.
pub fn cdf_coefficients(p: BetaPrimeParams) -> CoefficientVector {
    let (m, k) = (p.m as i64, p.k as i64);
    let d = p.degree();
    let coeffs = (1..=d)
        .map(|j| {
            let mut pj = BigInt::from(binomial(d, j));
            if (j as i64) < m {
                let prod: BigInt = (1..=j as i64).map(|i| BigInt::from(i - m - k)).product();
                let fact: BigInt = (1..=j as i64).map(BigInt::from).product();
                debug_assert!((&prod % &fact).is_zero());
                let ratio = prod / fact;
                if j % 2 == 1 {
                    pj += ratio;
                } else {
                    pj -= ratio;
                }
            }
            assert!(!pj.is_negative(), "CDF coefficient p_{j} is negative");
            pj.to_biguint().expect("nonnegative")
        })
        .collect();
    CoefficientVector::new(1, coeffs)
}

/// Scalar factor `(-1)^m (m-1)! / (B(m,k) ∏_{i=1}^{m} (i-m-k))` in front of
/// the CDF sum. It simplifies to exactly one; it is computed from the
/// unsimplified expression so callers can check that.
pub fn cdf_prefactor(p: BetaPrimeParams) -> f64 {
    let (m, k) = (p.m as i64, p.k as i64);
    let mut sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut ln_abs_prod = 0.0;
    for i in 1..=m {
        let factor = (i - m - k) as f64;
        if factor < 0.0 {
            sign = -sign;
        }
        ln_abs_prod += factor.abs().ln();
    }
    let ln_fact = ln_gamma(m as f64).expect("m >= 1");
    sign * (ln_fact - p.ln_beta() - ln_abs_prod).exp()
}

/// Order-statistic coefficients: `p` convolved with itself `n - 1` times
/// (offset `n - 1`), or `[1]` at offset 0 when `n = 1`.
pub fn order_stat_coefficients(p: BetaPrimeParams, n: u32) -> CoefficientVector {
    assert!(n >= 1, "need at least one receive antenna");
    let base = cdf_coefficients(p);
    let mut acc = CoefficientVector::identity();
    for _ in 1..n {
        acc = acc.convolve(&base);
    }
    acc
}

/// Beta-prime law with its CDF terms precomputed.
#[derive(Debug, Clone)]
pub struct BetaPrime {
    params: BetaPrimeParams,
    ln_beta: f64,
    prefactor: f64,
    // (power of x, ln p_j) for the nonzero coefficients
    cdf_terms: Vec<(f64, f64)>,
    // (power, ln C(M+K-1, power)) for powers below M: the survival function
    tail_terms: Vec<(f64, f64)>,
}

impl BetaPrime {
    pub fn new(params: BetaPrimeParams) -> Self {
        let coeffs = cdf_coefficients(params);
        let cdf_terms = coeffs
            .ln_coeffs()
            .into_iter()
            .enumerate()
            .filter(|(_, c)| c.is_finite())
            .map(|(j, c)| ((coeffs.offset() + j) as f64, c))
            .collect();
        let tail_terms = (0..params.m())
            .map(|j| (j as f64, ln_biguint(&binomial(params.degree(), j))))
            .collect();
        Self {
            params,
            ln_beta: params.ln_beta(),
            prefactor: cdf_prefactor(params),
            cdf_terms,
            tail_terms,
        }
    }

    pub fn params(&self) -> BetaPrimeParams {
        self.params
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(domain("beta_prime_pdf", format!("x = {x}, need x >= 0")));
        }
        let (m, k) = (self.params.m as f64, self.params.k as f64);
        if x == 0.0 {
            return Ok(if self.params.m == 1 {
                (-self.ln_beta).exp()
            } else {
                0.0
            });
        }
        Ok(((m - 1.0) * x.ln() - (m + k) * x.ln_1p() - self.ln_beta).exp())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(domain("beta_prime_cdf", format!("x = {x}, need x >= 0")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(1.0);
        }
        let ln_x = x.ln();
        let ln_den = self.params.degree() as f64 * x.ln_1p();
        let eval = |terms: &[(f64, f64)]| -> f64 {
            terms
                .iter()
                .map(|&(power, ln_c)| (ln_c + power * ln_x - ln_den).exp())
                .sum()
        };
        // Upper half: the survival sum avoids rounding noise next to 1.
        let tail = eval(&self.tail_terms);
        if tail < 0.5 {
            return Ok((1.0 - tail).clamp(0.0, 1.0));
        }
        Ok((self.prefactor * eval(&self.cdf_terms)).clamp(0.0, 1.0))
    }
}

pub fn beta_prime_pdf(x: f64, p: BetaPrimeParams) -> Result<f64> {
    BetaPrime::new(p).pdf(x)
}

pub fn beta_prime_cdf_closed(x: f64, p: BetaPrimeParams) -> Result<f64> {
    BetaPrime::new(p).cdf(x)
}

/// One term `q_j x^(m+k-1) / (1+x)^L` of the max-order density, indexed by
/// the power `k = (n-1) + j` used in the closed-form expectation.
#[derive(Debug, Clone, Copy)]
pub struct OrderTerm {
    pub k: u32,
    pub ln_q: f64,
}

/// Density of `Ω^(N) = max(Ω¹, …, Ωᴺ)` as a finite sum of rational terms.
#[derive(Debug, Clone)]
pub struct MaxOrderDensity {
    params: BetaPrimeParams,
    n: u32,
    prefactor: f64,
    ln_norm: f64,
    terms: Vec<OrderTerm>,
}

impl MaxOrderDensity {
    pub fn new(params: BetaPrimeParams, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(domain("max_order_pdf", "n must be >= 1"));
        }
        let q = order_stat_coefficients(params, n);
        let prefactor = cdf_prefactor(params);
        if !(prefactor > 0.0) {
            return Err(domain(
                "max_order_pdf",
                format!("CDF prefactor {prefactor} is not positive"),
            ));
        }
        let ln_norm = (n as f64).ln() - params.ln_beta() + (n - 1) as f64 * prefactor.ln();
        let terms = q
            .ln_coeffs()
            .into_iter()
            .enumerate()
            .filter(|(_, c)| c.is_finite())
            .map(|(j, ln_q)| OrderTerm {
                k: (q.offset() + j) as u32,
                ln_q,
            })
            .collect();
        Ok(Self {
            params,
            n,
            prefactor,
            ln_norm,
            terms,
        })
    }

    pub fn params(&self) -> BetaPrimeParams {
        self.params
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// CDF prefactor as evaluated from its unsimplified form.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// ln of `N / B(M,K) · prefactor^(N-1)`.
    pub fn ln_norm(&self) -> f64 {
        self.ln_norm
    }

    /// Nonzero terms in increasing power.
    pub fn terms(&self) -> &[OrderTerm] {
        &self.terms
    }

    /// Power of `(1 + x)` in every denominator: `N (M+K-1) + 1`.
    pub fn denominator_power(&self) -> u32 {
        self.n * self.params.degree() + 1
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(domain("max_order_pdf", format!("x = {x}, need x >= 0")));
        }
        let m = self.params.m;
        if x == 0.0 {
            // Only an x^0 term survives, which needs m = 1 and k = 0.
            return Ok(self
                .terms
                .iter()
                .find(|t| m + t.k == 1)
                .map_or(0.0, |t| (self.ln_norm + t.ln_q).exp()));
        }
        let ln_x = x.ln();
        let ln_den = self.denominator_power() as f64 * x.ln_1p();
        let sum: f64 = self
            .terms
            .iter()
            .map(|t| (t.ln_q + (m + t.k - 1) as f64 * ln_x - ln_den).exp())
            .sum();
        Ok(self.ln_norm.exp() * sum)
    }
}

pub fn max_order_pdf(x: f64, p: BetaPrimeParams, n: u32) -> Result<f64> {
    MaxOrderDensity::new(p, n)?.pdf(x)
}

/// Gamma(shape, 1) for integer shape, as a sum of `shape` Exponential(1)
/// draws.
pub fn sample_gamma(shape: u32, rng: &mut RandomStream) -> f64 {
    debug_assert!(shape >= 1);
    (0..shape).map(|_| rng.exponential()).sum()
}

/// Ratio of independent Gamma(m) and Gamma(k) draws, numerator first.
pub fn sample_beta_prime(p: BetaPrimeParams, rng: &mut RandomStream) -> f64 {
    let num = sample_gamma(p.m, rng);
    let den = sample_gamma(p.k, rng);
    num / den
}

/// Gamma(shape, scale) law fitted by moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit {
    pub shape: f64,
    pub scale: f64,
}

impl GammaFit {
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        gamma_p(self.shape, x / self.scale).expect("shape and x are positive")
    }
}

/// Moment fit of `Σ_k |g_k|² ζ_k` with i.i.d. Exponential(1) gains: the
/// mean is `Σζ_k` and the variance `Σζ_k²`.
pub fn fit_gamma_moments(zetas: &[f64]) -> Result<GammaFit> {
    if zetas.is_empty() {
        return Err(domain("fit_gamma_moments", "no interferer powers given"));
    }
    if let Some(bad) = zetas.iter().find(|z| !(**z > 0.0 && z.is_finite())) {
        return Err(domain(
            "fit_gamma_moments",
            format!("interferer power {bad} is not positive"),
        ));
    }
    let sum: f64 = zetas.iter().sum();
    let sum_sq: f64 = zetas.iter().map(|z| z * z).sum();
    Ok(GammaFit {
        shape: sum * sum / sum_sq,
        scale: sum_sq / sum,
    })
}
