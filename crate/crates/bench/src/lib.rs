//! Fixtures shared by the rascap benchmarks.

use rascap_core::{InterferenceSpec, LinkConfig, McConfig};

/// The 2×4 link with 10 interferers at ξ₀ = ζ = 10 dB.
pub fn reference_point() -> (LinkConfig, InterferenceSpec) {
    (
        LinkConfig::new(2, 4, 10),
        InterferenceSpec::from_db(10.0, 10.0).expect("valid dB values"),
    )
}

/// Antenna configurations swept by the closed-form benchmark.
pub const CONFIGS: [(u32, u32, u32); 4] = [(1, 1, 1), (2, 4, 10), (4, 4, 10), (8, 8, 20)];

pub fn bench_mc(trials: u64) -> McConfig {
    McConfig::new(trials, 1)
}
