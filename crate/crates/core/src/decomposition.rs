//! Bit-level telescoping decomposition of `|x - y|^p`.
//!
//! For a level `i` let
//!
//! * `F_i(x, y) = max(0, |x - y| - 2^i)^p`,
//! * `G_i(x, y) = F_i(x^(i), y^(i))` where `x^(i)` clears the bits below `i`,
//! * `g_i = G_i - G_{i+1}`, the contribution of bit `i`,
//! * `ĝ_i`, the same difference with both distances measured modulo
//!   `B_i = 2^i / eta` (see [`modular_level_term`]).
//!
//! Summed over all levels the `g_i` telescope to `F_{-u}`, which is within a
//! factor `1 - O(p/U)` of `|x - y|^p` on integers. Each `ĝ_i` only depends on
//! `(x^(i) mod B_i) / 2^i`, a symbol in `[0, 1/eta)`, so its text-to-pattern
//! sum is a small-alphabet problem; away from the levels that matter the
//! modular version agrees with `g_i` exactly.
//!
//! `1/eta` is always rounded up to a power of two `M >= 8`. This makes
//! `B_i` a multiple of `2^(i+1)`, so the same reduced symbol serves both
//! halves of `ĝ_i`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{invalid, out_of_range, Result};
use crate::fixed::{mod_norm_raw, pow2_raw, round_down, FixedPoint, MAX_FRAC_BITS};
use crate::math::{exp2i, pow_p, CompensatedSum};

/// Smallest reduced alphabet; keeps `eta <= 1/8`.
pub const MIN_ALPHABET: usize = 8;
/// Largest reduced alphabet a kernel table may use.
pub const MAX_ALPHABET: usize = 1 << 24;
/// Extra levels needed once inputs are multiplied by a factor below 9.
pub const SCALED_EXTRA_LEVELS: i32 = 4;

/// Parameters of one decomposition run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompParams {
    p: f64,
    eps: f64,
    eta_requested: f64,
    alphabet: usize,
    bits: u32,
    level_lo: i32,
    level_hi: i32,
}

impl DecompParams {
    /// `eta_requested` is rounded down so that `1/eta` is a power of two
    /// `>= 8`. With `scaled` the level range grows to `u + 4` to cover
    /// inputs multiplied by `r < 9`.
    pub fn new(p: f64, eps: f64, eta_requested: f64, bits: u32, scaled: bool) -> Result<Self> {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(invalid!("p must be a finite non-negative real, got {p}"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid!("eps must be positive, got {eps}"));
        }
        if !(eta_requested > 0.0 && eta_requested.is_finite()) {
            return Err(invalid!("eta must be positive, got {eta_requested}"));
        }
        if !(1..=MAX_FRAC_BITS).contains(&bits) {
            return Err(out_of_range!(
                "log2(U) must be in 1..={MAX_FRAC_BITS} for the decomposition, got {bits}"
            ));
        }
        let inverse = libm::ceil(1.0 / eta_requested);
        if inverse > MAX_ALPHABET as f64 {
            return Err(out_of_range!(
                "1/eta = {inverse} needs a reduced alphabet above {MAX_ALPHABET}; raise eps or override eta"
            ));
        }
        let alphabet = (inverse as usize).next_power_of_two().max(MIN_ALPHABET);
        let level_hi = bits as i32 + if scaled { SCALED_EXTRA_LEVELS } else { 0 };
        Ok(Self {
            p,
            eps,
            eta_requested,
            alphabet,
            bits,
            level_lo: -(bits as i32),
            level_hi,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Effective `eta = 1/M`.
    pub fn eta(&self) -> f64 {
        1.0 / self.alphabet as f64
    }

    pub fn eta_requested(&self) -> f64 {
        self.eta_requested
    }

    /// Reduced alphabet size `M = 1/eta`.
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// `u = log2(U)`, also the fixed-point precision.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn universe(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn level_lo(&self) -> i32 {
        self.level_lo
    }

    pub fn level_hi(&self) -> i32 {
        self.level_hi
    }

    pub fn levels(&self) -> RangeInclusive<i32> {
        self.level_lo..=self.level_hi
    }

    pub fn level_count(&self) -> usize {
        (self.level_hi - self.level_lo + 1) as usize
    }

    /// Same parameters with another exponent (the Hamming kernels use `p = 0`).
    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    fn check_level(&self, level: i32) -> Result<()> {
        if self.levels().contains(&level) {
            Ok(())
        } else {
            Err(invalid!("level {level} outside [{}, {}]", self.level_lo, self.level_hi))
        }
    }

    fn check_point(&self, x: &FixedPoint) -> Result<()> {
        if x.frac_bits() == self.bits {
            Ok(())
        } else {
            Err(invalid!(
                "value has {} fractional bits, expected {}",
                x.frac_bits(),
                self.bits
            ))
        }
    }

    /// `B_i = 2^i * M` in raw units; `None` when it exceeds every `u128`.
    fn block_raw(&self, level: i32) -> Option<u128> {
        let shift = (level + self.bits as i32) as u32 + self.alphabet.trailing_zeros();
        pow2_raw(shift)
    }
}

/// `max(0, diff - 2^level)^p` for a raw distance with `frac_bits` fractional bits.
#[inline]
fn excess_raw(diff: u128, level: i32, frac_bits: u32, p: f64) -> f64 {
    let shift = level + frac_bits as i32;
    if shift < 0 {
        let d = libm::ldexp(diff as f64, -(frac_bits as i32)) - exp2i(level);
        return pow_p(d, p);
    }
    match pow2_raw(shift as u32) {
        Some(threshold) if diff > threshold => pow_p(libm::ldexp((diff - threshold) as f64, -(frac_bits as i32)), p),
        _ => 0.0,
    }
}

/// `F_i(x, y) = max(0, |x - y| - 2^i)^p`.
pub fn excess_power(level: i32, x: FixedPoint, y: FixedPoint, p: f64) -> Result<f64> {
    let diff = x.abs_diff(&y)?;
    Ok(excess_raw(diff.raw(), level, diff.frac_bits(), p))
}

/// `G_i(x, y) = F_i(x^(i), y^(i))`.
pub fn rounded_excess_power(level: i32, x: FixedPoint, y: FixedPoint, p: f64) -> Result<f64> {
    excess_power(level, round_down(x, level)?, round_down(y, level)?, p)
}

/// `f_i = F_i - F_{i+1}`, the unrounded level difference.
pub fn unrounded_level_term(level: i32, x: FixedPoint, y: FixedPoint, p: f64) -> Result<f64> {
    Ok(excess_power(level, x, y, p)? - excess_power(level + 1, x, y, p)?)
}

/// `g_i = G_i - G_{i+1}`: what bit `i` adds once all higher bits are known.
pub fn level_term(level: i32, x: FixedPoint, y: FixedPoint, p: f64) -> Result<f64> {
    Ok(rounded_excess_power(level, x, y, p)? - rounded_excess_power(level + 1, x, y, p)?)
}

/// `ĝ_i`: like [`level_term`], but both rounded distances are replaced by
/// their modular norm `||.||_{B_i}` with `B_i = 2^i * M`.
pub fn modular_level_term(level: i32, x: FixedPoint, y: FixedPoint, params: &DecompParams) -> Result<f64> {
    params.check_level(level)?;
    params.check_point(&x)?;
    params.check_point(&y)?;
    let frac = params.bits;
    let norm = |d: u128| match params.block_raw(level) {
        Some(block) => mod_norm_raw(d, block),
        None => d,
    };
    let near = norm(round_down(x, level)?.raw().abs_diff(round_down(y, level)?.raw()));
    let far = norm(
        round_down(x, level + 1)?
            .raw()
            .abs_diff(round_down(y, level + 1)?.raw()),
    );
    Ok(excess_raw(near, level, frac, params.p) - excess_raw(far, level + 1, frac, params.p))
}

#[inline]
fn reduce_raw(raw: u128, shift: u32, mask: u64) -> u32 {
    if shift >= 128 {
        0
    } else {
        ((raw >> shift) as u64 & mask) as u32
    }
}

/// `(x^(i) mod B_i) / 2^i`, the symbol in `[0, M)` through which `ĝ_i` sees `x`.
pub fn reduce_symbol(x: FixedPoint, level: i32, params: &DecompParams) -> Result<u32> {
    params.check_level(level)?;
    params.check_point(&x)?;
    Ok(reduce_raw(
        x.raw(),
        (level + params.bits as i32) as u32,
        params.alphabet as u64 - 1,
    ))
}

/// Reduces a whole fixed-point string (raw values with `params.bits()`
/// fractional bits) at one level.
pub fn reduce_raw_string(raw: &[u128], level: i32, params: &DecompParams) -> Result<Vec<u32>> {
    params.check_level(level)?;
    let shift = (level + params.bits as i32) as u32;
    let mask = params.alphabet as u64 - 1;
    Ok(raw.iter().map(|&r| reduce_raw(r, shift, mask)).collect())
}

/// Level-independent part of the kernel tables: `w^p` for every modular
/// distance `w` in `[0, M/2]` (in units of `2^i`).
///
/// Level `i`'s table is `2^{ip}` times
/// `max(0, w(a - b) - 1)^p - max(0, w(a' - b') - 2)^p`, where `w` is the
/// modular norm over `M` and `a'`, `b'` are `a`, `b` rounded down to even.
/// The table is circulant in that structure, so only these powers are stored.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    alphabet: usize,
    p: f64,
    powers: Vec<f64>,
}

impl KernelProfile {
    pub fn new(alphabet: usize, p: f64) -> Result<Self> {
        if alphabet < 2 || !alphabet.is_power_of_two() || alphabet > MAX_ALPHABET {
            return Err(invalid!(
                "alphabet must be a power of two in [2, {MAX_ALPHABET}], got {alphabet}"
            ));
        }
        let powers = (0..=alphabet / 2).map(|w| pow_p(w as f64, p)).collect();
        Ok(Self { alphabet, p, powers })
    }

    pub fn for_params(params: &DecompParams) -> Result<Self> {
        Self::new(params.alphabet, params.p)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Kernel value at level 0.
    #[inline]
    pub fn unit_entry(&self, a: u32, b: u32) -> f64 {
        let m = self.alphabet as u32;
        let d = a.wrapping_sub(b) & (m - 1);
        let w = d.min(m - d);
        let half = m / 2;
        let e = (a >> 1).wrapping_sub(b >> 1) & (half - 1);
        let w2 = 2 * e.min(half - e);
        self.powers[w.saturating_sub(1) as usize] - self.powers[w2.saturating_sub(2) as usize]
    }

    pub fn level_kernel(self: &Arc<Self>, level: i32) -> LevelKernel {
        LevelKernel {
            level,
            scale: libm::exp2(level as f64 * self.p),
            profile: Arc::clone(self),
        }
    }
}

/// `ĝ_i` as an `M x M` table over reduced symbols.
#[derive(Debug, Clone)]
pub struct LevelKernel {
    level: i32,
    scale: f64,
    profile: Arc<KernelProfile>,
}

impl LevelKernel {
    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn alphabet(&self) -> usize {
        self.profile.alphabet
    }

    #[inline]
    pub fn get(&self, a: u32, b: u32) -> f64 {
        let v = self.profile.unit_entry(a, b);
        if v == 0.0 {
            0.0
        } else {
            self.scale * v
        }
    }

    /// Materializes the full table; only sensible for small alphabets.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let m = self.alphabet() as u32;
        (0..m).map(|a| (0..m).map(|b| self.get(a, b)).collect()).collect()
    }
}

/// Table of `ĝ_level` over reduced symbols.
pub fn build_level_kernel(level: i32, params: &DecompParams) -> Result<LevelKernel> {
    params.check_level(level)?;
    Ok(Arc::new(KernelProfile::for_params(params)?).level_kernel(level))
}

/// Sums `f_i` and `g_i` over the full level range. Both telescope to
/// `F_{lo}(x, y)` whenever `|x - y| <= 2^(hi + 1)`.
pub fn telescope_check(x: FixedPoint, y: FixedPoint, params: &DecompParams) -> Result<(f64, f64)> {
    params.check_point(&x)?;
    params.check_point(&y)?;
    let mut f_sum = CompensatedSum::new();
    let mut g_sum = CompensatedSum::new();
    for level in params.levels() {
        f_sum.add(unrounded_level_term(level, x, y, params.p)?);
        g_sum.add(level_term(level, x, y, params.p)?);
    }
    Ok((f_sum.value(), g_sum.value()))
}
