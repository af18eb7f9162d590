//! Randomized `(1 + eps)`-approximate Hamming distances: the `p -> 0` limit
//! of the randomized `l_p` engine.
//!
//! With `0^0 = 0` and `x^0 = 1`, the level term becomes
//! `[||x^(i) - y^(i)||_{B_i} > 2^i] - [||x^(i+1) - y^(i+1)||_{B_i} > 2^(i+1)]`,
//! a table over `{-1, 0, 1}`. Default `eta = eps / (144 log2 U)`.
//!
//! Inputs use their native alphabet; no alphabet compaction is attempted.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::convolution::CorrelationStats;
use crate::decomposition::{DecompParams, KernelProfile, LevelKernel};
use crate::error::{invalid, Result};
use crate::exact::{DistanceArray, EngineOptions, IntString, Scale};
use crate::math::median_odd;
use crate::pipeline::{Decomposer, FixedString};
use crate::randomized::RandomScale;

/// Constant in the default `eta = eps / (144 log2 U)`.
pub const ETA_CONSTANT: f64 = 144.0;

/// Indicator-valued level table; see [`hamming_level_kernel`].
pub type HammingKernelLevel = LevelKernel;

/// Level table of the Hamming limit for `params` (whose `p` is ignored).
pub fn hamming_level_kernel(level: i32, params: &DecompParams) -> Result<HammingKernelLevel> {
    if !params.levels().contains(&level) {
        return Err(invalid!(
            "level {level} outside [{}, {}]",
            params.level_lo(),
            params.level_hi()
        ));
    }
    Ok(Arc::new(KernelProfile::new(params.alphabet(), 0.0)?).level_kernel(level))
}

pub fn hamming_eta(eps: f64, bits: u32) -> f64 {
    eps / (ETA_CONSTANT * bits as f64)
}

/// Reusable Hamming engine for one `(eps, u)`.
#[derive(Debug, Clone)]
pub struct HammingPlan {
    decomposer: Decomposer,
}

impl HammingPlan {
    pub fn new(eps: f64, bits: u32, options: EngineOptions, eta: Option<f64>) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid!("eps must lie in (0, 1], got {eps}"));
        }
        let eta = eta.unwrap_or_else(|| hamming_eta(eps, bits));
        let params = DecompParams::new(0.0, eps, eta, bits, true)?;
        Ok(Self {
            decomposer: Decomposer::new(params, options)?,
        })
    }

    pub fn params(&self) -> &DecompParams {
        self.decomposer.params()
    }

    pub fn decomposer(&self) -> &Decomposer {
        &self.decomposer
    }

    /// One run: level sums rounded to integers and clamped to `[0, m]`.
    pub fn run_counts(
        &self,
        text: &IntString,
        pattern: &IntString,
        scale: RandomScale,
        stats: &mut CorrelationStats,
    ) -> Result<Vec<f64>> {
        if pattern.is_empty() || pattern.len() > text.len() {
            return Err(invalid!("pattern length must be in 1..={}", text.len()));
        }
        let bits = self.params().bits();
        if scale.frac_bits() != bits {
            return Err(invalid!("scale must carry {bits} fractional bits"));
        }
        if text.bits().max(pattern.bits()) > bits {
            return Err(invalid!("strings exceed the plan's alphabet 2^{bits}"));
        }
        let t = FixedString::scaled(text, scale.numerator(), bits);
        let q = FixedString::scaled(pattern, scale.numerator(), bits);
        let m = pattern.len() as f64;
        let sums = self.decomposer.sum_levels(&t, &q, stats)?;
        Ok(sums.into_iter().map(|v| libm::round(v).clamp(0.0, m)).collect())
    }

    pub fn run_single(&self, text: &IntString, pattern: &IntString, scale: RandomScale) -> Result<DistanceArray> {
        let counts = self.run_counts(text, pattern, scale, &mut CorrelationStats::default())?;
        Ok(DistanceArray::new(counts, Scale::Count))
    }

    /// Per-position median of `reps` runs.
    pub fn run_amplified(
        &self,
        text: &IntString,
        pattern: &IntString,
        seed: u64,
        reps: usize,
        stats: &mut CorrelationStats,
    ) -> Result<DistanceArray> {
        if reps == 0 || reps.is_multiple_of(2) {
            return Err(invalid!("repetition count must be odd, got {reps}"));
        }
        let bits = self.params().bits();
        let runs = (0..reps as u64)
            .map(|run| self.run_counts(text, pattern, RandomScale::derive(seed, run, bits), stats))
            .collect::<Result<Vec<_>>>()?;
        let mut column = Vec::with_capacity(reps);
        let values = (0..runs[0].len())
            .map(|i| {
                column.clear();
                column.extend(runs.iter().map(|r| r[i]));
                median_odd(&mut column)
            })
            .collect();
        Ok(DistanceArray::new(values, Scale::Count))
    }
}

/// Median-amplified approximate Hamming text-to-pattern distance.
pub fn approx_hamming(
    text: &IntString,
    pattern: &IntString,
    eps: f64,
    seed: u64,
    reps: usize,
) -> Result<DistanceArray> {
    let bits = text.bits().max(pattern.bits());
    HammingPlan::new(eps, bits, EngineOptions::default(), None)?.run_amplified(
        text,
        pattern,
        seed,
        reps,
        &mut CorrelationStats::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn indicator_table() {
        let params = DecompParams::new(0.0, 0.5, 1.0 / 16.0, 4, true).unwrap();
        let k = hamming_level_kernel(1, &params).unwrap();
        for row in k.to_dense() {
            assert!(row.iter().all(|&v| v == -1.0 || v == 0.0 || v == 1.0));
        }
        assert_eq!(k.get(3, 3), 0.0);
        assert!(hamming_level_kernel(40, &params).is_err());
    }

    #[test]
    fn identical_strings_and_validation() {
        let t = IntString::new(vec![0, 1, 1, 0, 1], 1).unwrap();
        assert_eq!(approx_hamming(&t, &t, 0.25, 3, 3).unwrap().values(), [0.0]);
        assert!(approx_hamming(&t, &t, 0.25, 3, 2).is_err());
        assert!(approx_hamming(&t, &t, 0.0, 3, 3).is_err());
    }

    #[test]
    fn counts_stay_in_range() {
        let t = IntString::new((0..64).map(|i| (i * 37 % 256) as u64).collect(), 8).unwrap();
        let p = IntString::new(vec![3, 3, 200, 1], 8).unwrap();
        let d = approx_hamming(&t, &p, 0.5, 11, 5).unwrap();
        assert!(d.values().iter().all(|&v| (0.0..=4.0).contains(&v) && v.fract() == 0.0));
    }
}
