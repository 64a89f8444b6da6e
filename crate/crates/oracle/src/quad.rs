//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

// Tabulated to more digits than f64 holds; kept verbatim from the source table.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
///
/// Panics if the tolerance is not met within the subdivision budget, since an
/// oracle that silently under-delivers would make every downstream test lie.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Quadrature {
    let first = gk15(&f, a, b);
    let mut total = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while error > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_INTERVALS {
            panic!("quadrature on [{a}, {b}] did not converge: value {total}, error {error}");
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            error -= worst.error;
            continue;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Recompute the sums periodically to shed accumulated rounding.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let intervals = heap.len();
    Quadrature {
        value: heap.iter().map(|s| s.value).sum(),
        error,
        intervals,
    }
}

/// Integrates `f` over `[0, ∞)` through the map `x = t / (1 - t)`.
///
/// The unit interval is pre-split at the images of `x = 10^-6 … 10^6` so
/// sharply peaked integrands near the origin are resolved.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> f64 {
    let mapped = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let x = t / s;
        let v = f(x) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut breaks = vec![0.0];
    for e in -6..=6 {
        let x = 10f64.powi(e);
        breaks.push(x / (1.0 + x));
    }
    breaks.push(1.0);
    // A crude pass sets an absolute floor so pieces that contribute nothing
    // are not refined forever.
    let rough: f64 = breaks
        .windows(2)
        .map(|w| gk15(&mapped, w[0], w[1]).value.abs())
        .sum();
    let abs_tol = 1e-3 * rel_tol * rough / (breaks.len() - 1) as f64;
    breaks
        .windows(2)
        .map(|w| integrate(mapped, w[0], w[1], abs_tol, rel_tol).value)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| 3.0 * x * x, 0.0, 2.0, 0.0, 1e-14);
        assert!((q.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate_semi_infinite(|x| (-x).exp(), 1e-12);
        assert!((v - 1.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn algebraic_tail() {
        // ∫ (1+x)^-3 dx = 1/2
        let v = integrate_semi_infinite(|x| (1.0 + x).powi(-3), 1e-12);
        assert!((v - 0.5).abs() < 1e-11, "{v}");
    }

    #[test]
    fn peaked_integrand() {
        // ∫ 1e4 e^(-1e4 x) dx = 1
        let v = integrate_semi_infinite(|x| 1e4 * (-1e4 * x).exp(), 1e-12);
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }
}
