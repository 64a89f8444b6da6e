//! Closed-form effective capacity of the RAS MIMO-OSTBC link.
//!
//! With the interference-dominated SINR `ξ₀ Ω / (M R_c)` and the selected
//! antenna carrying `Ω^(N) = max_n Ωⁿ`, the effective capacity is
//!
//! ```text
//! E_C(θ) = -(1/θ) ln E{ (1 + ξ₀ Ω^(N) / (M R_c))^(-θ̆) },   θ̆ = θ B T_f R_c / ln 2
//! ```
//!
//! and the expectation is a finite sum of Beta-function × ₂F₁ products, one
//! per term of the max-order density.

use std::f64::consts::LN_2;

use crate::dist::{BetaPrimeParams, MaxOrderDensity};
use crate::error::{domain, Error, Result};
use crate::specfun::{ln_beta, ln_hyp2f1};
use crate::units::db_to_linear;

/// Deterministic description of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Transmit antennas M.
    pub m: u32,
    /// Receive antennas N (one is selected per frame).
    pub n: u32,
    /// Co-channel interferers K.
    pub k: u32,
    /// OSTBC code rate, symbols per time slot.
    pub rc: f64,
    pub bandwidth_hz: f64,
    pub frame_s: f64,
}

impl LinkConfig {
    pub const DEFAULT_BANDWIDTH_HZ: f64 = 100e3;
    pub const DEFAULT_FRAME_S: f64 = 1e-3;

    /// Rate-1 code over 100 kHz with 1 ms frames.
    pub fn new(m: u32, n: u32, k: u32) -> Self {
        Self {
            m,
            n,
            k,
            rc: 1.0,
            bandwidth_hz: Self::DEFAULT_BANDWIDTH_HZ,
            frame_s: Self::DEFAULT_FRAME_S,
        }
    }

    pub fn with_rc(mut self, rc: f64) -> Self {
        self.rc = rc;
        self
    }

    pub fn with_timing(mut self, bandwidth_hz: f64, frame_s: f64) -> Self {
        self.bandwidth_hz = bandwidth_hz;
        self.frame_s = frame_s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.k == 0 {
            return Err(Error::Config(format!(
                "antenna and interferer counts must be >= 1 (m = {}, n = {}, k = {})",
                self.m, self.n, self.k
            )));
        }
        if !(self.rc > 0.0 && self.rc <= 1.0) {
            return Err(Error::Config(format!(
                "code rate {} not in (0, 1]",
                self.rc
            )));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::Config(format!(
                "bandwidth {} must be positive",
                self.bandwidth_hz
            )));
        }
        if !(self.frame_s > 0.0 && self.frame_s.is_finite()) {
            return Err(Error::Config(format!(
                "frame duration {} must be positive",
                self.frame_s
            )));
        }
        Ok(())
    }

    /// B·T_f, the symbols per frame; divides E_C into bits/s/Hz.
    pub fn symbols_per_frame(&self) -> f64 {
        self.bandwidth_hz * self.frame_s
    }

    pub fn beta_prime(&self) -> Result<BetaPrimeParams> {
        BetaPrimeParams::new(self.m, self.k)
    }
}

/// QoS exponent θ (1/bit) and its dimensionless form θ̆.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosSpec {
    pub theta: f64,
    pub theta_breve: f64,
}

/// `θ̆ = θ B T_f R_c / ln 2`.
pub fn make_qos(theta: f64, cfg: &LinkConfig) -> Result<QosSpec> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(
            "make_qos",
            format!("theta = {theta}, need theta > 0"),
        ));
    }
    Ok(QosSpec {
        theta,
        theta_breve: theta * cfg.bandwidth_hz * cfg.frame_s * cfg.rc / LN_2,
    })
}

/// Interference scenario, stored in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceSpec {
    /// Signal-to-interference ratio ξ₀ = γ₀/ζ.
    pub xi0: f64,
    /// Per-interferer interference-to-noise ratio ζ.
    pub zeta: f64,
    /// Average SNR γ₀; only the exact simulator needs it.
    pub gamma0: Option<f64>,
}

impl InterferenceSpec {
    pub fn new(xi0: f64, zeta: f64) -> Result<Self> {
        if !(xi0 > 0.0 && xi0.is_finite()) {
            return Err(domain(
                "InterferenceSpec",
                format!("xi0 = {xi0} must be positive"),
            ));
        }
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(domain(
                "InterferenceSpec",
                format!("zeta = {zeta} must be positive"),
            ));
        }
        Ok(Self {
            xi0,
            zeta,
            gamma0: None,
        })
    }

    /// Builds the spec from dB values, with `γ₀ = ξ₀ ζ`.
    pub fn from_db(xi0_db: f64, zeta_db: f64) -> Result<Self> {
        let spec = Self::new(db_to_linear(xi0_db), db_to_linear(zeta_db))?;
        Ok(Self {
            gamma0: Some(spec.xi0 * spec.zeta),
            ..spec
        })
    }

    pub fn with_gamma0(self, gamma0: f64) -> Result<Self> {
        if !(gamma0 > 0.0) || ((gamma0 / self.zeta - self.xi0) / self.xi0).abs() > 1e-12 {
            return Err(domain(
                "InterferenceSpec",
                format!(
                    "gamma0 = {gamma0} inconsistent with xi0 = {}, zeta = {}",
                    self.xi0, self.zeta
                ),
            ));
        }
        Ok(Self {
            gamma0: Some(gamma0),
            ..self
        })
    }

    /// γ₀, falling back to ξ₀ ζ.
    pub fn gamma0(&self) -> f64 {
        self.gamma0.unwrap_or(self.xi0 * self.zeta)
    }

    /// Same interference, different ξ₀ (γ₀ follows).
    pub fn with_xi0(self, xi0: f64) -> Result<Self> {
        let spec = Self::new(xi0, self.zeta)?;
        Ok(match self.gamma0 {
            Some(_) => Self {
                gamma0: Some(xi0 * self.zeta),
                ..spec
            },
            None => spec,
        })
    }
}

/// Bits carried by one frame at the given SINR: `B T_f R_c log₂(1 + sinr)`.
pub fn rate_bits(sinr: f64, cfg: &LinkConfig) -> f64 {
    cfg.bandwidth_hz * cfg.frame_s * cfg.rc * sinr.ln_1p() / LN_2
}

/// Closed-form evaluator for one link configuration, reusable across ξ₀
/// and θ.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    cfg: LinkConfig,
    density: MaxOrderDensity,
}

impl ClosedForm {
    pub fn new(cfg: &LinkConfig) -> Result<Self> {
        cfg.validate()?;
        let density = MaxOrderDensity::new(cfg.beta_prime()?, cfg.n)?;
        // The literal normalization must agree with its simplified form
        // N / B(M, K).
        let pre = density.prefactor();
        assert!(
            (pre - 1.0).abs() < 1e-12,
            "CDF prefactor evaluated to {pre} for (M, K) = ({}, {})",
            cfg.m,
            cfg.k
        );
        let simplified = (cfg.n as f64).ln() - cfg.beta_prime()?.ln_beta();
        assert!((density.ln_norm() - simplified).abs() < 1e-10);
        Ok(Self { cfg: *cfg, density })
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    pub fn density(&self) -> &MaxOrderDensity {
        &self.density
    }

    /// ln E{(1 + ξ₀ Ω^(N) / (M R_c))^(-θ̆)}.
    pub fn ln_expectation(&self, xi0: f64, theta_breve: f64) -> Result<f64> {
        if !(xi0 > 0.0) || !xi0.is_finite() {
            return Err(domain(
                "expectation_term",
                format!("xi0 = {xi0} must be positive"),
            ));
        }
        if !(theta_breve >= 0.0) || !theta_breve.is_finite() {
            return Err(domain(
                "expectation_term",
                format!("theta_breve = {theta_breve} must be >= 0"),
            ));
        }
        if theta_breve == 0.0 {
            return Ok(0.0);
        }
        let m = self.cfg.m as f64;
        let k_interf = self.cfg.k as f64;
        let c = self.density.denominator_power() as f64 + theta_breve;
        let z = 1.0 - xi0 / (m * self.cfg.rc);

        let mut max = f64::NEG_INFINITY;
        let mut logs = Vec::with_capacity(self.density.terms().len());
        for term in self.density.terms() {
            let b = m + term.k as f64;
            let second = c - b;
            assert!(
                second >= k_interf + theta_breve - 1e-9 * c,
                "second Beta argument {second} below K + θ̆"
            );
            let ln_term = term.ln_q + ln_beta(b, second)? + ln_hyp2f1(theta_breve, b, c, z)?;
            max = max.max(ln_term);
            logs.push(ln_term);
        }
        let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
        Ok((self.density.ln_norm() + max + sum.ln()).min(0.0))
    }

    pub fn expectation(&self, xi0: f64, theta_breve: f64) -> Result<f64> {
        self.ln_expectation(xi0, theta_breve).map(f64::exp)
    }

    /// Effective capacity in bits per frame.
    pub fn effective_capacity(&self, xi0: f64, theta: f64) -> Result<f64> {
        let qos = make_qos(theta, &self.cfg)?;
        let ln_e = self.ln_expectation(xi0, qos.theta_breve)?;
        Ok((-ln_e / theta).max(0.0))
    }

    /// Effective capacity in bits/s/Hz.
    pub fn normalized(&self, xi0: f64, theta: f64) -> Result<f64> {
        Ok(self.effective_capacity(xi0, theta)? / self.cfg.symbols_per_frame())
    }
}

/// E{(1 + ξ₀ Ω^(N) / (M R_c))^(-θ̆)}, in (0, 1].
pub fn expectation_term(spec: &InterferenceSpec, cfg: &LinkConfig, qos: &QosSpec) -> Result<f64> {
    ClosedForm::new(cfg)?.expectation(spec.xi0, qos.theta_breve)
}

/// Effective capacity in bits per frame.
pub fn effective_capacity(spec: &InterferenceSpec, cfg: &LinkConfig, theta: f64) -> Result<f64> {
    ClosedForm::new(cfg)?.effective_capacity(spec.xi0, theta)
}

/// Effective capacity divided by B·T_f, in bits/s/Hz.
pub fn normalized_effective_capacity(
    spec: &InterferenceSpec,
    cfg: &LinkConfig,
    theta: f64,
) -> Result<f64> {
    ClosedForm::new(cfg)?.normalized(spec.xi0, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qos_examples() {
        let cfg = LinkConfig::new(2, 4, 10);
        for (theta, expect) in [
            (0.01, std::f64::consts::LOG2_E),
            (0.1, 14.426_950_408_889_634),
            (0.001, 0.144_269_504_088_896_34),
        ] {
            let q = make_qos(theta, &cfg).unwrap();
            assert!((q.theta_breve - expect).abs() < 1e-12 * expect);
        }
        assert!(make_qos(0.0, &cfg).is_err());
        assert!(make_qos(-1.0, &cfg).is_err());
    }

    #[test]
    fn rate_examples() {
        let cfg = LinkConfig::new(1, 1, 1);
        assert_eq!(rate_bits(0.0, &cfg), 0.0);
        assert!((rate_bits(1.0, &cfg) - 100.0).abs() < 1e-12);
        assert!((rate_bits(3.0, &cfg) - 200.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(LinkConfig::new(0, 1, 1).validate().is_err());
        assert!(LinkConfig::new(1, 1, 1).with_rc(1.5).validate().is_err());
        assert!(LinkConfig::new(1, 1, 1).with_rc(0.75).validate().is_ok());
        assert!(LinkConfig::new(1, 1, 1)
            .with_timing(0.0, 1e-3)
            .validate()
            .is_err());
    }

    #[test]
    fn interference_spec_invariants() {
        let s = InterferenceSpec::from_db(10.0, 20.0).unwrap();
        assert!((s.gamma0() - 1000.0).abs() < 1e-9);
        assert!(s.with_gamma0(1000.0).is_ok());
        assert!(s.with_gamma0(999.0).is_err());
        assert!(InterferenceSpec::new(0.0, 1.0).is_err());
        let moved = s.with_xi0(2.0).unwrap();
        assert!((moved.gamma0() - 200.0).abs() < 1e-9);
    }

    #[test]
    fn zero_theta_breve_gives_one() {
        for (m, n, k) in [(1, 1, 1), (2, 4, 10), (4, 2, 5)] {
            let cf = ClosedForm::new(&LinkConfig::new(m, n, k)).unwrap();
            assert_eq!(cf.expectation(3.0, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn degenerate_link_has_analytic_expectation() {
        // ∫ (1+x)^-1 (1+x)^-2 dx = 1/2
        let cf = ClosedForm::new(&LinkConfig::new(1, 1, 1)).unwrap();
        let e = cf.expectation(1.0, 1.0).unwrap();
        assert!((e - 0.5).abs() < 1e-12, "{e}");
    }

    #[test]
    fn decreasing_in_theta() {
        let cfg = LinkConfig::new(2, 4, 10);
        let cf = ClosedForm::new(&cfg).unwrap();
        let xi0 = db_to_linear(10.0);
        let mut prev = f64::INFINITY;
        for i in 0..=16 {
            let theta = 10f64.powf(-4.0 + i as f64 * 0.25);
            let ec = cf.effective_capacity(xi0, theta).unwrap();
            assert!(ec < prev && ec >= 0.0, "theta = {theta}");
            prev = ec;
        }
    }

    #[test]
    fn ras_gain_over_miso_at_twenty_db() {
        let spec = InterferenceSpec::from_db(20.0, 10.0).unwrap();
        let ras = LinkConfig::new(2, 4, 10);
        let miso = LinkConfig::new(2, 1, 10);
        for (theta, gain) in [(0.1, 1.5415), (0.01, 1.3845), (0.001, 1.0880)] {
            let g = normalized_effective_capacity(&spec, &ras, theta).unwrap()
                - normalized_effective_capacity(&spec, &miso, theta).unwrap();
            assert!((g - gain).abs() < 0.05, "theta = {theta}: {g}");
        }
    }

    #[test]
    fn normalized_is_scaled_capacity() {
        let spec = InterferenceSpec::from_db(5.0, 10.0).unwrap();
        let cfg = LinkConfig::new(2, 3, 4).with_timing(2e5, 5e-4);
        let ec = effective_capacity(&spec, &cfg, 0.02).unwrap();
        let norm = normalized_effective_capacity(&spec, &cfg, 0.02).unwrap();
        assert!((norm * cfg.symbols_per_frame() - ec).abs() <= 4.0 * f64::EPSILON * ec);
    }

    #[test]
    fn effective_capacity_rejects_bad_theta() {
        let spec = InterferenceSpec::from_db(5.0, 10.0).unwrap();
        let cfg = LinkConfig::new(2, 3, 4);
        assert!(effective_capacity(&spec, &cfg, 0.0).is_err());
        assert!(effective_capacity(&spec, &cfg, -0.5).is_err());
    }
}
