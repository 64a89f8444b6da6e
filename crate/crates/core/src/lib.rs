//! Effective capacity of a MIMO-OSTBC downlink with single receive-antenna
//! selection under co-channel interference.
//!
//! The crate is layered bottom-up:
//!
//! * [`specfun`]: special functions, chiefly the Gauss hypergeometric
//!   function.
//! * [`dist`]: the Beta-prime law of the per-antenna SINR ratio and the law
//!   of its maximum over `N` antennas.
//! * [`effcap`]: the closed-form effective capacity.
//! * [`mc`]: a chunk-parallel Monte Carlo link simulator and a queue
//!   simulator used to check the closed form.
//! * [`figures`] and [`validate`]: CSV sweeps and the closed-form vs
//!   simulation report behind the `rascap` CLI.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dist;
pub mod effcap;
mod error;
pub mod figures;
pub mod mc;
pub mod rng;
pub mod specfun;
pub mod units;
pub mod validate;

pub use dist::{BetaPrime, BetaPrimeParams, CoefficientVector, GammaFit, MaxOrderDensity};
pub use effcap::{
    effective_capacity, expectation_term, make_qos, normalized_effective_capacity, rate_bits,
    ClosedForm, InterferenceSpec, LinkConfig, QosSpec,
};
pub use error::{Error, Result};
pub use mc::{McConfig, McEstimate, QueueTailResult, SinrModel};
pub use rng::RandomStream;
