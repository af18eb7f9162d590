//! Randomized `(1 + eps)`-approximate `l_p` distances for `0 < p < 1`.
//!
//! Without convexity the per-level error of `ĝ_i` can be large on
//! adversarial bit patterns, so both strings are first multiplied by a
//! random `r` in `[1, 9)`. One run has expected additive error at most
//! `eps p / (3 ln 2)` on every p-th power, so by Markov it is within
//! `1 +- eps` (on `l_p`) with probability at least 2/3; the per-position
//! median of `t = O(log n)` independent runs makes that hold everywhere
//! with high probability.
//!
//! `r` lives on the `2^-u` grid, so scaled values stay exact in fixed point.
//! Run `k` of seed `s` draws its scale from a ChaCha stream keyed by
//! `(s, k)`, which makes every run reproducible on its own.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolution::CorrelationStats;
use crate::decomposition::DecompParams;
use crate::error::{invalid, Result};
use crate::exact::{DistanceArray, EngineOptions, IntString, Scale};
use crate::math::{median_odd, pow_p};
use crate::pipeline::{finalize_powers, Decomposer, FixedString};

/// Constant in the default `eta = eps p / (15555 log2(U) ln 2)`.
pub const ETA_CONSTANT: f64 = 15555.0;

/// Multiplier `r = numerator / 2^frac_bits` in `[1, 9)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomScale {
    numerator: u64,
    frac_bits: u32,
    seed: u64,
    run: u64,
}

impl RandomScale {
    /// Uniform draw from the `2^(frac_bits + 3)` grid points of `[1, 9)`.
    pub fn derive(seed: u64, run: u64, frac_bits: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run);
        let one = 1u64 << frac_bits;
        let numerator = rng.random_range(one..9 * one);
        Self {
            numerator,
            frac_bits,
            seed,
            run,
        }
    }

    /// An explicit scale; fails unless `1 <= numerator / 2^frac_bits < 9`.
    pub fn from_numerator(numerator: u64, frac_bits: u32) -> Result<Self> {
        let one = 1u64 << frac_bits;
        if numerator < one || numerator >= 9 * one {
            return Err(invalid!("scale {numerator}/2^{frac_bits} is outside [1, 9)"));
        }
        Ok(Self {
            numerator,
            frac_bits,
            seed: 0,
            run: 0,
        })
    }

    pub fn one(frac_bits: u32) -> Self {
        Self {
            numerator: 1u64 << frac_bits,
            frac_bits,
            seed: 0,
            run: 0,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn run(&self) -> u64 {
        self.run
    }

    pub fn value(&self) -> f64 {
        libm::ldexp(self.numerator as f64, -(self.frac_bits as i32))
    }
}

/// Default `eta` for the randomized engines.
pub fn randomized_eta(p: f64, eps: f64, bits: u32) -> f64 {
    eps * p / (ETA_CONSTANT * bits as f64 * LN_2)
}

/// `2 ceil(log2 n) + 1`.
pub fn default_reps(n: usize) -> usize {
    let log = if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    };
    2 * log + 1
}

/// Per-position median over runs; every run must have the same length and
/// the number of runs must be odd.
pub fn median_combine(runs: &[Vec<f64>]) -> Result<Vec<f64>> {
    if runs.is_empty() || runs.len().is_multiple_of(2) {
        return Err(invalid!("need an odd number of runs, got {}", runs.len()));
    }
    let len = runs[0].len();
    if runs.iter().any(|r| r.len() != len) {
        return Err(invalid!("runs differ in length"));
    }
    let mut column = Vec::with_capacity(runs.len());
    Ok((0..len)
        .map(|i| {
            column.clear();
            column.extend(runs.iter().map(|r| r[i]));
            median_odd(&mut column)
        })
        .collect())
}

fn check_strings(text: &IntString, pattern: &IntString) -> Result<()> {
    if pattern.is_empty() || pattern.len() > text.len() {
        return Err(invalid!("pattern length must be in 1..={}", text.len()));
    }
    Ok(())
}

/// Validated input of [`approx_lp_le1`].
#[derive(Debug, Clone, Copy)]
pub struct AmplifiedRequest<'a> {
    text: &'a IntString,
    pattern: &'a IntString,
    p: f64,
    eps: f64,
    reps: usize,
    seed: u64,
}

impl<'a> AmplifiedRequest<'a> {
    /// Requires `0 < p < 1`, `12 (ln 2)^2 / U <= eps <= 1` and an odd `reps`.
    pub fn new(text: &'a IntString, pattern: &'a IntString, p: f64, eps: f64, reps: usize, seed: u64) -> Result<Self> {
        check_strings(text, pattern)?;
        check_p(p)?;
        let universe = text.universe().max(pattern.universe()) as f64;
        let floor = 12.0 * LN_2 * LN_2 / universe;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid!("eps must lie in (0, 1], got {eps}"));
        }
        if eps < floor {
            return Err(invalid!(
                "eps = {eps} is below 12 (ln 2)^2 / U = {floor}; compute exactly instead"
            ));
        }
        if reps == 0 || reps.is_multiple_of(2) {
            return Err(invalid!("repetition count must be odd, got {reps}"));
        }
        Ok(Self {
            text,
            pattern,
            p,
            eps,
            reps,
            seed,
        })
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid!("the randomized engine needs 0 < p < 1, got {p}"))
    }
}

/// Reusable randomized engine for one `(p, eps, u)`: the kernel table is
/// built once and shared by every run.
#[derive(Debug, Clone)]
pub struct RandomizedPlan {
    decomposer: Decomposer,
}

impl RandomizedPlan {
    /// `eta` overrides [`randomized_eta`].
    pub fn new(p: f64, eps: f64, bits: u32, options: EngineOptions, eta: Option<f64>) -> Result<Self> {
        check_p(p)?;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid!("eps must lie in (0, 1], got {eps}"));
        }
        let eta = eta.unwrap_or_else(|| randomized_eta(p, eps, bits));
        let params = DecompParams::new(p, eps, eta, bits, true)?;
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

    /// One run: p-th powers of the estimate, already divided by `r^p`.
    pub fn run_powers(
        &self,
        text: &IntString,
        pattern: &IntString,
        scale: RandomScale,
        stats: &mut CorrelationStats,
    ) -> Result<Vec<f64>> {
        check_strings(text, pattern)?;
        let params = self.params();
        if scale.frac_bits != params.bits() {
            return Err(invalid!("scale must carry {} fractional bits", params.bits()));
        }
        if text.bits().max(pattern.bits()) > params.bits() {
            return Err(invalid!("strings exceed the plan's alphabet 2^{}", params.bits()));
        }
        let t = FixedString::scaled(text, scale.numerator, params.bits());
        let q = FixedString::scaled(pattern, scale.numerator, params.bits());
        let mut sums = self.decomposer.sum_levels(&t, &q, stats)?;
        finalize_powers(&mut sums, pow_p(scale.value(), params.p()));
        Ok(sums)
    }

    /// One run on the `l_p` scale.
    pub fn run_single(&self, text: &IntString, pattern: &IntString, scale: RandomScale) -> Result<DistanceArray> {
        let powers = self.run_powers(text, pattern, scale, &mut CorrelationStats::default())?;
        Ok(DistanceArray::new(powers, Scale::PowerP(self.params().p())).into_lp())
    }

    /// Median of `reps` runs with scales derived from `(seed, run)`.
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
            .map(|run| self.run_powers(text, pattern, RandomScale::derive(seed, run, bits), stats))
            .collect::<Result<Vec<_>>>()?;
        let median = median_combine(&runs)?;
        Ok(DistanceArray::new(median, Scale::PowerP(self.params().p())).into_lp())
    }
}

/// One randomized run with an explicit scale.
pub fn approx_lp_le1_single(
    text: &IntString,
    pattern: &IntString,
    p: f64,
    eps: f64,
    scale: RandomScale,
) -> Result<DistanceArray> {
    let bits = text.bits().max(pattern.bits());
    RandomizedPlan::new(p, eps, bits, EngineOptions::default(), None)?.run_single(text, pattern, scale)
}

/// Median-amplified randomized `(1 + eps)`-approximation, `0 < p < 1`.
pub fn approx_lp_le1(req: &AmplifiedRequest<'_>) -> Result<DistanceArray> {
    let bits = req.text.bits().max(req.pattern.bits());
    let plan = RandomizedPlan::new(req.p, req.eps, bits, EngineOptions::default(), None)?;
    plan.run_amplified(
        req.text,
        req.pattern,
        req.seed,
        req.reps,
        &mut CorrelationStats::default(),
    )
}
