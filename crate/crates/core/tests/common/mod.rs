#![allow(dead_code)]

use lpdist_core::IntString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_string(rng: &mut ChaCha8Rng, len: usize, bits: u32) -> IntString {
    let symbols = (0..len).map(|_| rng.random_range(0..1u64 << bits)).collect();
    IntString::new(symbols, bits).unwrap()
}

/// Direct `sum_j kernel(t[i+j], p[j])`.
pub fn double_loop<K: Fn(u64, u64) -> f64>(text: &IntString, pattern: &IntString, kernel: K) -> Vec<f64> {
    let p = pattern.symbols();
    text.symbols()
        .windows(p.len())
        .map(|w| w.iter().zip(p).map(|(&a, &b)| kernel(a, b)).sum())
        .collect()
}

pub fn rel_err(approx: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if approx == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (approx - exact).abs() / exact
    }
}

pub fn max_rel_err(approx: &[f64], exact: &[f64]) -> f64 {
    assert_eq!(approx.len(), exact.len());
    approx
        .iter()
        .zip(exact)
        .map(|(&a, &e)| rel_err(a, e))
        .fold(0.0, f64::max)
}
