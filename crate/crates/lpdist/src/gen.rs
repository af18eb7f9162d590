//! Seeded instance generator.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};
use crate::format::StringFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Distribution {
    /// Independent uniform symbols.
    Uniform,
    /// Mostly symbols within 1 of a multiple of a large power of two.
    Adversarial,
}

/// Share of adversarial symbols placed next to a rounding boundary.
const BOUNDARY_SHARE: f64 = 0.8;

/// Smallest exponent counted as a "large" power of two: `ceil(u / 2)`.
pub fn boundary_exponent(bits: u32) -> u32 {
    bits.div_ceil(2)
}

fn near_boundary(rng: &mut ChaCha8Rng, bits: u32) -> u64 {
    let universe = 1u64 << bits;
    let i = rng.random_range(boundary_exponent(bits)..=bits);
    let k = rng.random_range(0..=universe >> i);
    let base = k << i;
    let offset: i64 = rng.random_range(-1..=1);
    base.saturating_add_signed(offset).min(universe - 1)
}

fn symbols(rng: &mut ChaCha8Rng, len: usize, bits: u32, dist: Distribution) -> Vec<u64> {
    (0..len)
        .map(|_| match dist {
            Distribution::Adversarial if rng.random_bool(BOUNDARY_SHARE) => near_boundary(rng, bits),
            _ => rng.random_range(0..1u64 << bits),
        })
        .collect()
}

/// Text of length `n` and pattern of length `m` over `[0, U)`.
pub fn generate(n: usize, m: usize, universe: u64, dist: Distribution, seed: u64) -> Result<(StringFile, StringFile)> {
    if m == 0 || m > n {
        return Err(CliError::usage(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    if universe < 2 || !universe.is_power_of_two() {
        return Err(CliError::usage(format!(
            "U must be a power of two >= 2, got {universe}"
        )));
    }
    let bits = universe.trailing_zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = symbols(&mut rng, n, bits, dist);
    let pattern = symbols(&mut rng, m, bits, dist);
    Ok((StringFile::new(text, universe)?, StringFile::new(pattern, universe)?))
}

/// Fraction of symbols within 1 of a multiple of `2^i` for some `i >= u/2`.
pub fn boundary_fraction(symbols: &[u64], bits: u32) -> f64 {
    if symbols.is_empty() {
        return 0.0;
    }
    let step = 1u64 << boundary_exponent(bits);
    let near = symbols
        .iter()
        .filter(|&&s| {
            let r = s % step;
            r <= 1 || step - r <= 1
        })
        .count();
    near as f64 / symbols.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_respects_the_contract() {
        let (t, p) = generate(8, 2, 4, Distribution::Uniform, 1).unwrap();
        assert_eq!((t.string.len(), p.string.len()), (8, 2));
        assert!(t.string.symbols().iter().chain(p.string.symbols()).all(|&s| s < 4));
        assert_eq!(generate(8, 2, 4, Distribution::Uniform, 1).unwrap(), (t, p));
    }

    #[test]
    fn adversarial_sits_on_boundaries() {
        for bits in [2, 5, 8, 12, 20] {
            let (t, p) = generate(4000, 100, 1 << bits, Distribution::Adversarial, bits as u64).unwrap();
            assert!(boundary_fraction(t.string.symbols(), bits) >= 0.5);
            assert!(boundary_fraction(p.string.symbols(), bits) >= 0.5);
        }
        let (t, _) = generate(4000, 1, 1 << 16, Distribution::Uniform, 3).unwrap();
        assert!(boundary_fraction(t.string.symbols(), 16) < 0.1);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(generate(4, 5, 8, Distribution::Uniform, 0).is_err());
        assert!(generate(4, 0, 8, Distribution::Uniform, 0).is_err());
        assert!(generate(4, 2, 6, Distribution::Uniform, 0).is_err());
    }
}
