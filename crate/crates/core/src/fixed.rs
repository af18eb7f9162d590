//! Unsigned binary fixed point with a per-value count of fractional bits.
//!
//! All rounding (`x^(i)`) and modular-norm arithmetic happens on the raw
//! integer, so both are bit exact.

use crate::error::{invalid, Result};

/// Largest supported fractional precision. Scaled inputs reach
/// `9 * 2^(2 * bits)` in raw units and block lengths up to
/// `2^24 * 2^(2 * bits + 4)`, which must fit in a `u128`.
pub const MAX_FRAC_BITS: u32 = 48;

/// `raw / 2^frac_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedPoint {
    raw: u128,
    frac_bits: u32,
}

/// `1 << shift`, or `None` when it does not fit.
#[inline]
pub(crate) fn pow2_raw(shift: u32) -> Option<u128> {
    1u128.checked_shl(shift)
}

impl FixedPoint {
    pub const fn new(raw: u128, frac_bits: u32) -> Self {
        Self { raw, frac_bits }
    }

    /// The integer `x` with `frac_bits` fractional bits.
    pub fn from_int(x: u64, frac_bits: u32) -> Self {
        Self {
            raw: (x as u128) << frac_bits,
            frac_bits,
        }
    }

    pub fn raw(&self) -> u128 {
        self.raw
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn to_f64(&self) -> f64 {
        libm::ldexp(self.raw as f64, -(self.frac_bits as i32))
    }

    pub fn abs_diff(&self, other: &Self) -> Result<Self> {
        self.same_precision(other)?;
        Ok(Self::new(self.raw.abs_diff(other.raw), self.frac_bits))
    }

    pub(crate) fn same_precision(&self, other: &Self) -> Result<()> {
        if self.frac_bits == other.frac_bits {
            Ok(())
        } else {
            Err(invalid!(
                "fixed-point precision mismatch ({} vs {} fractional bits)",
                self.frac_bits,
                other.frac_bits
            ))
        }
    }

    /// Raw shift that corresponds to `2^level`; requires `level >= -frac_bits`.
    pub(crate) fn level_shift(&self, level: i32) -> Result<u32> {
        let shift = level + self.frac_bits as i32;
        if shift < 0 {
            Err(invalid!(
                "level {level} is below -{} and cannot be represented exactly",
                self.frac_bits
            ))
        } else {
            Ok(shift as u32)
        }
    }
}

/// `x^(i) = floor(x / 2^i) * 2^i`: clears every bit below position `i`.
pub fn round_down(x: FixedPoint, level: i32) -> Result<FixedPoint> {
    let shift = x.level_shift(level)?;
    let raw = if shift >= 128 { 0 } else { (x.raw >> shift) << shift };
    Ok(FixedPoint::new(raw, x.frac_bits))
}

/// `||r||_c = min(r mod c, c - (r mod c))`, the distance from `r` to the
/// nearest multiple of `c`.
pub fn mod_norm(r: FixedPoint, c: FixedPoint) -> Result<FixedPoint> {
    r.same_precision(&c)?;
    if c.raw == 0 {
        return Err(invalid!("modulus must be positive"));
    }
    Ok(FixedPoint::new(mod_norm_raw(r.raw, c.raw), r.frac_bits))
}

#[inline]
pub(crate) fn mod_norm_raw(r: u128, c: u128) -> u128 {
    let rem = r % c;
    rem.min(c - rem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_down_examples() {
        let five = FixedPoint::from_int(5, 0);
        assert_eq!(round_down(five, 0).unwrap(), five);
        assert_eq!(round_down(five, 1).unwrap(), FixedPoint::from_int(4, 0));
        // 5.75 with two fractional bits
        let x = FixedPoint::new(23, 2);
        assert_eq!(round_down(x, -1).unwrap().to_f64(), 5.5);
        assert!(round_down(x, -3).is_err());
        assert_eq!(round_down(x, 200).unwrap().raw(), 0);
    }

    #[test]
    fn mod_norm_examples() {
        let f = |v| FixedPoint::from_int(v, 3);
        assert_eq!(mod_norm(f(7), f(5)).unwrap(), f(2));
        assert_eq!(mod_norm(f(10), f(5)).unwrap(), f(0));
        assert_eq!(mod_norm(f(3), f(8)).unwrap(), f(3));
        assert!(mod_norm(f(3), f(0)).is_err());
        assert!(mod_norm(f(3), FixedPoint::from_int(8, 2)).is_err());
    }
}
