//! Runs the level decomposition over whole strings.
//!
//! Every approximate engine is the same three steps: lift both strings to
//! fixed point (optionally multiplied by a scale factor), evaluate one
//! reduced-alphabet distance per level, and add the level arrays position by
//! position from the lowest level up.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::convolution::CorrelationStats;
use crate::decomposition::{reduce_raw_string, DecompParams, KernelProfile};
use crate::error::{invalid, Result};
use crate::exact::{reduced_distance, Backend, EngineOptions, IntString};
use crate::math::CompensatedSum;

/// A string lifted to fixed point: `raw[j] / 2^frac_bits = scale * s[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedString {
    raw: Vec<u128>,
    frac_bits: u32,
}

impl FixedString {
    /// `s` itself.
    pub fn unscaled(s: &IntString, frac_bits: u32) -> Self {
        Self::scaled(s, 1u64 << frac_bits, frac_bits)
    }

    /// `s` multiplied by `scale_numerator / 2^frac_bits`; exact.
    pub fn scaled(s: &IntString, scale_numerator: u64, frac_bits: u32) -> Self {
        let raw = s
            .symbols()
            .iter()
            .map(|&x| x as u128 * scale_numerator as u128)
            .collect();
        Self { raw, frac_bits }
    }

    pub fn raw(&self) -> &[u128] {
        &self.raw
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

/// Parameters plus the shared kernel table for repeated runs.
#[derive(Debug, Clone)]
pub struct Decomposer {
    params: DecompParams,
    profile: Arc<KernelProfile>,
    options: EngineOptions,
}

impl Decomposer {
    pub fn new(params: DecompParams, options: EngineOptions) -> Result<Self> {
        let profile = Arc::new(KernelProfile::for_params(&params)?);
        Ok(Self {
            params,
            profile,
            options,
        })
    }

    pub fn params(&self) -> &DecompParams {
        &self.params
    }

    pub fn options(&self) -> &EngineOptions {
        &self.options
    }

    /// Backend [`Backend::Auto`] resolves to for this shape.
    pub fn backend_for(&self, text_len: usize, pattern_len: usize) -> Result<Backend> {
        self.options.resolve(text_len, pattern_len, self.params.alphabet())
    }

    fn check(&self, text: &FixedString, pattern: &FixedString) -> Result<()> {
        let bits = self.params.bits();
        if text.frac_bits != bits || pattern.frac_bits != bits {
            return Err(invalid!("fixed strings must carry {bits} fractional bits"));
        }
        Ok(())
    }

    /// Text-to-pattern distance under `ĝ_level`.
    pub fn level(
        &self,
        text: &FixedString,
        pattern: &FixedString,
        level: i32,
        stats: &mut CorrelationStats,
    ) -> Result<Vec<f64>> {
        self.check(text, pattern)?;
        let a = reduce_raw_string(&text.raw, level, &self.params)?;
        let b = reduce_raw_string(&pattern.raw, level, &self.params)?;
        let kernel = self.profile.level_kernel(level);
        reduced_distance(
            &a,
            &b,
            self.params.alphabet(),
            |x, y| kernel.get(x, y),
            &self.options,
            stats,
        )
    }

    /// `sum_i ĝ_i` per alignment, unclamped.
    pub fn sum_levels(
        &self,
        text: &FixedString,
        pattern: &FixedString,
        stats: &mut CorrelationStats,
    ) -> Result<Vec<f64>> {
        self.check(text, pattern)?;
        if pattern.is_empty() || pattern.len() > text.len() {
            return Err(invalid!("pattern length must be in 1..={}", text.len()));
        }
        let mut acc = vec![CompensatedSum::new(); text.len() - pattern.len() + 1];
        for level in self.params.levels() {
            let row = self.level(text, pattern, level, stats)?;
            for (a, v) in acc.iter_mut().zip(row) {
                a.add(v);
            }
        }
        Ok(acc.iter().map(CompensatedSum::value).collect())
    }
}

/// Adds per-level arrays (given lowest level first) with compensated summation.
pub fn combine_levels(per_level: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = per_level.first() else {
        return Vec::new();
    };
    let mut acc = vec![CompensatedSum::new(); first.len()];
    for row in per_level {
        for (a, &v) in acc.iter_mut().zip(row) {
            a.add(v);
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// Estimated p-th powers below this are floating noise around an exact zero:
/// on integer inputs every nonzero `(l_p)^p` is at least 1 and the engines
/// never underestimate it by half.
pub const ZERO_SNAP: f64 = 0.5;

/// Divides by `divisor`, clamps negatives and snaps sub-`ZERO_SNAP` values to 0.
pub fn finalize_powers(sums: &mut [f64], divisor: f64) {
    for v in sums.iter_mut() {
        let x = *v / divisor;
        *v = if x < ZERO_SNAP { 0.0 } else { x };
    }
}
