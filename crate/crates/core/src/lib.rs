//! Exact and approximate text-to-pattern distances under `l_p` norms.
//!
//! Given a text `T` of length `n` and a pattern `P` of length `m` over the
//! integer alphabet `[0, U)`, the text-to-pattern distance is the array
//! `S[i] = (sum_j |t[i+j] - p[j]|^p)^(1/p)` for every alignment `i`.
//!
//! | Engine | `p` | Guarantee |
//! |--------|-----|-----------|
//! | [`brute_force_lp`], [`brute_force_hamming`] | any | exact, `O(nm)` |
//! | [`exact_even_p`] | 2, 4, 6, ... | exact, `p - 1` FFT correlations |
//! | [`small_alphabet_distance`] | any kernel | exact, one correlation per symbol |
//! | [`approx_lp_ge1`] | `>= 1` | deterministic `1 +- eps` |
//! | [`approx_lp_le1`] | `(0, 1)` | `1 +- eps` with high probability |
//! | [`approx_hamming`] | 0 | `1 +- eps` with high probability |
//!
//! The approximate engines split `|x - y|^p` into one term per bit level
//! ([`decomposition`]); each term only depends on a few bits of `x` and `y`,
//! so its text-to-pattern sum is an exact small-alphabet problem.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod convolution;
pub mod decomposition;
pub mod deterministic;
mod error;
pub mod exact;
pub mod fft;
pub mod fixed;
pub mod hamming;
pub mod math;
pub mod pipeline;
pub mod randomized;

pub use convolution::{correlate, correlate_with_fft_len, naive_correlate, BlockPlan, CorrelationStats, Correlator};
pub use decomposition::{
    build_level_kernel, excess_power, level_term, modular_level_term, reduce_symbol, telescope_check, DecompParams,
    KernelProfile, LevelKernel,
};
pub use deterministic::{approx_lp_ge1, approx_lp_ge1_with, ApproxOutput, ApproxRequest};
pub use error::{Error, Result};
pub use exact::{
    brute_force_hamming, brute_force_lp, exact_even_p, exact_even_p_with, small_alphabet_distance,
    small_alphabet_distance_with, Backend, DistanceArray, EngineOptions, IntString, Scale,
};
pub use fixed::{mod_norm, round_down, FixedPoint};
pub use hamming::{approx_hamming, HammingPlan};
pub use randomized::{approx_lp_le1, approx_lp_le1_single, AmplifiedRequest, RandomScale, RandomizedPlan};
