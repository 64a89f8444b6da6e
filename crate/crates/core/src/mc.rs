//! Monte Carlo link simulator and queue validator.
//!
//! Trials are split into fixed-size chunks; chunk `c` always draws from
//! substream `c` of the configured seed, and per-chunk summaries are reduced
//! in chunk order. Results are therefore bit-identical for any thread count.

use rayon::prelude::*;

use crate::dist::{sample_beta_prime, sample_gamma, BetaPrimeParams};
use crate::effcap::{rate_bits, InterferenceSpec, LinkConfig};
use crate::error::{domain, Error, Result};
use crate::rng::RandomStream;

/// Minimum number of chunks, so the between-chunk variance is meaningful.
pub const MIN_CHUNKS: u64 = 100;

/// Fraction of queue frames discarded before tail statistics are collected.
pub const QUEUE_WARMUP_FRACTION: f64 = 0.1;

/// Tail probabilities used by the queue slope fit.
pub const TAIL_FIT_WINDOW: (f64, f64) = (1e-4, 1e-1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Draws per substream.
    pub chunk: u64,
}

impl McConfig {
    /// Chunk size `trials / MIN_CHUNKS`, giving at least [`MIN_CHUNKS`] chunks
    /// whenever `trials >= MIN_CHUNKS`.
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            chunk: (trials / MIN_CHUNKS).max(1),
        }
    }

    pub fn with_chunk(self, chunk: u64) -> Self {
        Self { chunk, ..self }
    }

    pub fn chunks(&self) -> u64 {
        self.trials.div_ceil(self.chunk.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.chunk == 0 {
            return Err(Error::Config("trials and chunk must be >= 1".into()));
        }
        if self.chunks() < MIN_CHUNKS {
            return Err(Error::Config(format!(
                "{} trials in chunks of {} give {} chunks, need at least {MIN_CHUNKS}",
                self.trials,
                self.chunk,
                self.chunks()
            )));
        }
        Ok(())
    }

    fn chunk_len(&self, c: u64) -> u64 {
        self.chunk.min(self.trials - c * self.chunk)
    }

    /// Runs `f` once per chunk, in parallel, returning results in chunk order.
    fn map_chunks<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RandomStream, u64) -> T + Sync,
    {
        (0..self.chunks())
            .into_par_iter()
            .map(|c| {
                let mut rng = RandomStream::new(self.seed, c);
                f(&mut rng, self.chunk_len(c))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Divides value and standard error by a positive constant.
    pub fn scaled(self, divisor: f64) -> Self {
        Self {
            value: self.value / divisor,
            stderr: self.stderr / divisor,
            ..self
        }
    }

    /// `(other - value) / stderr`
    pub fn z_score(&self, other: f64) -> f64 {
        (other - self.value) / self.stderr
    }
}

/// SINR model used by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SinrModel {
    /// `γ₀/(M R_c) · Σ|h|² / (1 + Σ|g_k|² ζ_k)`.
    Exact,
    /// Interference-dominated `ξ₀/(M R_c) · Σ|h|² / Σ|g_k|²`.
    Approx,
}

impl SinrModel {
    pub fn name(self) -> &'static str {
        match self {
            SinrModel::Exact => "exact",
            SinrModel::Approx => "approx",
        }
    }
}

/// Per-antenna SINR sampler. Both models consume the stream identically
/// (per antenna: M exponentials for the link, then K for the interferers),
/// so exact and approximate runs with one seed are coupled draw by draw.
#[derive(Debug, Clone)]
struct Sampler {
    model: SinrModel,
    params: BetaPrimeParams,
    n: u32,
    scale: f64,
    zetas: Vec<f64>,
}

impl Sampler {
    fn new(model: SinrModel, spec: &InterferenceSpec, cfg: &LinkConfig) -> Result<Self> {
        cfg.validate()?;
        let per_antenna = cfg.m as f64 * cfg.rc;
        Ok(match model {
            SinrModel::Exact => Self {
                model,
                params: cfg.beta_prime()?,
                n: cfg.n,
                scale: spec.gamma0() / per_antenna,
                zetas: vec![spec.zeta; cfg.k as usize],
            },
            SinrModel::Approx => Self {
                model,
                params: cfg.beta_prime()?,
                n: cfg.n,
                scale: spec.xi0 / per_antenna,
                zetas: Vec::new(),
            },
        })
    }

    #[inline]
    fn draw(&self, rng: &mut RandomStream) -> f64 {
        match self.model {
            SinrModel::Exact => exact_sinr(self.scale, self.params.m(), &self.zetas, rng),
            SinrModel::Approx => self.scale * sample_beta_prime(self.params, rng),
        }
    }

    #[inline]
    fn max_sinr(&self, rng: &mut RandomStream) -> f64 {
        (0..self.n).fold(0.0, |best, _| best.max(self.draw(rng)))
    }
}

#[inline]
fn exact_sinr(scale: f64, m: u32, zetas: &[f64], rng: &mut RandomStream) -> f64 {
    let signal = sample_gamma(m, rng);
    let interference: f64 = zetas.iter().map(|z| z * rng.exponential()).sum();
    scale * signal / (1.0 + interference)
}

/// One SINR per receive antenna under the exact model, with explicit
/// per-interferer powers. An empty `zetas` gives the interference-free SNR.
pub fn sample_sinr_exact(
    spec: &InterferenceSpec,
    cfg: &LinkConfig,
    zetas: &[f64],
    rng: &mut RandomStream,
) -> Vec<f64> {
    let scale = spec.gamma0() / (cfg.m as f64 * cfg.rc);
    (0..cfg.n)
        .map(|_| exact_sinr(scale, cfg.m, zetas, rng))
        .collect()
}

/// One SINR per receive antenna under the interference-dominated model.
pub fn sample_sinr_approx(
    spec: &InterferenceSpec,
    cfg: &LinkConfig,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    let params = cfg.beta_prime()?;
    let scale = spec.xi0 / (cfg.m as f64 * cfg.rc);
    Ok((0..cfg.n)
        .map(|_| scale * sample_beta_prime(params, rng))
        .collect())
}

// Per-chunk log-domain sum of e^(-θR): ln Σ e^v.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    count: u64,
    ln_sum: f64,
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut acc = 0.0;
    for v in values {
        if v > max {
            acc = acc * (max - v).exp() + 1.0;
            max = v;
        } else {
            acc += (v - max).exp();
        }
    }
    max + acc.ln()
}

/// Monte Carlo effective capacity in bits per frame.
///
/// The estimate is `-(1/θ) ln(mean e^(-θR))`; its standard error follows
/// from the between-chunk spread of the mean via the delta method.
pub fn mc_effective_capacity(
    spec: &InterferenceSpec,
    cfg: &LinkConfig,
    theta: f64,
    mc: &McConfig,
    model: SinrModel,
) -> Result<McEstimate> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(
            "mc_effective_capacity",
            format!("theta = {theta}, need theta > 0"),
        ));
    }
    mc.validate()?;
    let sampler = Sampler::new(model, spec, cfg)?;
    let chunks = mc.map_chunks(|rng, len| {
        let mut max = f64::NEG_INFINITY;
        let mut acc = 0.0;
        for _ in 0..len {
            let v = -theta * rate_bits(sampler.max_sinr(rng), cfg);
            if v > max {
                acc = acc * (max - v).exp() + 1.0;
                max = v;
            } else {
                acc += (v - max).exp();
            }
        }
        LogSum {
            count: len,
            ln_sum: max + acc.ln(),
        }
    });
    let total = mc.trials as f64;
    let ln_mean = log_sum_exp(chunks.iter().map(|c| c.ln_sum)) - total.ln();
    // Between-chunk variance of the ratio estimator, relative to the mean.
    let spread: f64 = chunks
        .iter()
        .map(|c| {
            let n = c.count as f64;
            let rel = (c.ln_sum - n.ln() - ln_mean).exp();
            (n * (rel - 1.0)).powi(2)
        })
        .sum();
    let k = chunks.len() as f64;
    let rel_var = k / (k - 1.0) * spread / (total * total);
    Ok(McEstimate {
        value: -ln_mean / theta,
        stderr: rel_var.sqrt() / theta,
        trials: mc.trials,
        seed: mc.seed,
    })
}

/// Chunked mean and standard error of a per-trial statistic.
fn chunked_mean<F>(mc: &McConfig, stat: F) -> McEstimate
where
    F: Fn(&mut RandomStream) -> f64 + Sync,
{
    let sums = mc.map_chunks(|rng, len| {
        let s: f64 = (0..len).map(|_| stat(rng)).sum();
        (len as f64, s)
    });
    let total = mc.trials as f64;
    let mean = sums.iter().map(|(_, s)| s).sum::<f64>() / total;
    let k = sums.len() as f64;
    let spread: f64 = sums.iter().map(|(n, s)| (s - mean * n).powi(2)).sum();
    McEstimate {
        value: mean,
        stderr: (k / (k - 1.0) * spread).sqrt() / total,
        trials: mc.trials,
        seed: mc.seed,
    }
}

/// Mean rate E{R} in bits per frame with antenna selection.
pub fn mc_mean_rate(
    spec: &InterferenceSpec,
    cfg: &LinkConfig,
    mc: &McConfig,
    model: SinrModel,
) -> Result<McEstimate> {
    mc.validate()?;
    let sampler = Sampler::new(model, spec, cfg)?;
    Ok(chunked_mean(mc, |rng| {
        rate_bits(sampler.max_sinr(rng), cfg)
    }))
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples`
/// (sorted in place) and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Draws of `Σ_k |g_k|² ζ_k` with Exponential(1) gains, in chunk order.
pub fn weighted_gamma_samples(zetas: &[f64], mc: &McConfig) -> Result<Vec<f64>> {
    if zetas.is_empty() || zetas.iter().any(|z| !(*z > 0.0 && z.is_finite())) {
        return Err(domain(
            "weighted_gamma_samples",
            "interferer powers must be positive",
        ));
    }
    mc.validate()?;
    let chunks = mc.map_chunks(|rng, len| {
        (0..len)
            .map(|_| zetas.iter().map(|z| z * rng.exponential()).sum::<f64>())
            .collect::<Vec<f64>>()
    });
    Ok(chunks.concat())
}

/// Empirical CDF tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub trials: u64,
}

/// Empirical CDF of `Σ_k |g_k|² ζ_k` on `points` uniform grid points over
/// `[0, mean + 6·std]`.
pub fn mc_weighted_gamma_cdf(zetas: &[f64], mc: &McConfig, points: usize) -> Result<EmpiricalCdf> {
    let mut samples = weighted_gamma_samples(zetas, mc)?;
    samples.sort_unstable_by(f64::total_cmp);
    let mean: f64 = zetas.iter().sum();
    let std = zetas.iter().map(|z| z * z).sum::<f64>().sqrt();
    let upper = mean + 6.0 * std;
    let points = points.max(2);
    let n = samples.len() as f64;
    let grid: Vec<f64> = (0..points)
        .map(|i| upper * i as f64 / (points - 1) as f64)
        .collect();
    let cdf = grid
        .iter()
        .map(|&x| samples.partition_point(|&s| s <= x) as f64 / n)
        .collect();
    Ok(EmpiricalCdf {
        grid,
        cdf,
        trials: mc.trials,
    })
}

/// Outcome of a queue simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueTailResult {
    /// Fitted decay rate `-d ln Pr{Q > q} / dq`, when at least three grid
    /// points fall inside [`TAIL_FIT_WINDOW`].
    pub slope: Option<f64>,
    pub q_grid: Vec<f64>,
    pub tail_probs: Vec<f64>,
    /// QoS exponent the arrival rate was derived from.
    pub theta_ref: f64,
    pub mean_service: f64,
    /// Frames contributing to the tail statistics (after warm-up).
    pub frames: u64,
}

impl QueueTailResult {
    /// `|slope - θ_ref| / θ_ref`
    pub fn relative_error(&self) -> Option<f64> {
        self.slope
            .map(|s| (s - self.theta_ref).abs() / self.theta_ref)
    }
}

/// Uniform threshold grid reaching where `e^(-θ q)` is about 1e-5.
pub fn default_q_grid(theta_ref: f64, points: usize) -> Vec<f64> {
    let top = (1e5f64).ln() / theta_ref;
    (0..points)
        .map(|i| top * i as f64 / (points - 1) as f64)
        .collect()
}

// Chunks generated in parallel per batch before the sequential recursion.
const QUEUE_BATCH_CHUNKS: u64 = 64;

/// Simulates `Q_{t+1} = max(Q_t + a − R_t, 0)` with i.i.d. service `R_t`
/// from the interference-dominated model with antenna selection, over
/// `mc.trials` frames. The first [`QUEUE_WARMUP_FRACTION`] of frames are
/// discarded; the tail slope is a least-squares fit of `ln Pr{Q > q}` over
/// grid points with probabilities in [`TAIL_FIT_WINDOW`].
pub fn queue_tail_exponent(
    arrival_bits_per_frame: f64,
    spec: &InterferenceSpec,
    cfg: &LinkConfig,
    theta_ref: f64,
    mc: &McConfig,
    q_grid: &[f64],
) -> Result<QueueTailResult> {
    if !(arrival_bits_per_frame > 0.0 && arrival_bits_per_frame.is_finite()) {
        return Err(domain(
            "queue_tail_exponent",
            "arrival rate must be positive",
        ));
    }
    if !(theta_ref > 0.0) {
        return Err(domain("queue_tail_exponent", "theta_ref must be positive"));
    }
    if q_grid.is_empty() || q_grid.windows(2).any(|w| w[1] <= w[0]) || q_grid[0] < 0.0 {
        return Err(domain(
            "queue_tail_exponent",
            "q grid must be nonempty, nonnegative and strictly increasing",
        ));
    }
    mc.validate()?;
    let sampler = Sampler::new(SinrModel::Approx, spec, cfg)?;
    let warmup = (mc.trials as f64 * QUEUE_WARMUP_FRACTION) as u64;

    let mut queue = 0.0f64;
    let mut frame = 0u64;
    let mut service_sum = 0.0;
    // hist[i]: frames whose backlog exceeds exactly the first i thresholds.
    let mut hist = vec![0u64; q_grid.len() + 1];
    let chunks = mc.chunks();
    let mut start = 0;
    while start < chunks {
        let end = (start + QUEUE_BATCH_CHUNKS).min(chunks);
        let batch: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map(|c| {
                let mut rng = RandomStream::new(mc.seed, c);
                (0..mc.chunk_len(c))
                    .map(|_| rate_bits(sampler.max_sinr(&mut rng), cfg))
                    .collect()
            })
            .collect();
        for service in batch.iter().flatten() {
            service_sum += service;
            queue = (queue + arrival_bits_per_frame - service).max(0.0);
            if frame >= warmup {
                hist[q_grid.partition_point(|&q| q < queue)] += 1;
            }
            frame += 1;
        }
        start = end;
    }

    let mean_service = service_sum / mc.trials as f64;
    if arrival_bits_per_frame >= mean_service {
        return Err(Error::Unstable {
            arrival: arrival_bits_per_frame,
            mean_service,
        });
    }
    let counted = mc.trials - warmup;
    let mut tail_probs = vec![0.0; q_grid.len()];
    let mut above = 0u64;
    for j in (0..q_grid.len()).rev() {
        above += hist[j + 1];
        tail_probs[j] = above as f64 / counted as f64;
    }

    let (lo, hi) = TAIL_FIT_WINDOW;
    let points: Vec<(f64, f64)> = q_grid
        .iter()
        .zip(&tail_probs)
        .filter(|(_, &p)| p >= lo && p <= hi)
        .map(|(&q, &p)| (q, p.ln()))
        .collect();
    let slope = (points.len() >= 3).then(|| -least_squares_slope(&points));

    Ok(QueueTailResult {
        slope,
        q_grid: q_grid.to_vec(),
        tail_probs,
        theta_ref,
        mean_service,
        frames: counted,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}
