//! Exact text-to-pattern distances.
//!
//! Three routes: direct double loops (the reference every approximate engine
//! is checked against), the alphabet decomposition that turns an arbitrary
//! per-symbol kernel into one correlation per reduced symbol, and the
//! binomial expansion that makes even `p` a handful of correlations.

use alloc::vec;
use alloc::vec::Vec;

use crate::convolution::{BlockPlan, CorrelationStats, Correlator};
use crate::error::{invalid, out_of_range, Result};
use crate::math::pow_p;

/// Largest supported `log2(U)`.
pub const MAX_BITS: u32 = 63;

/// A string over the integer alphabet `[0, U)` with `U = 2^bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntString {
    symbols: Vec<u64>,
    bits: u32,
}

impl IntString {
    pub fn new(symbols: Vec<u64>, bits: u32) -> Result<Self> {
        if !(1..=MAX_BITS).contains(&bits) {
            return Err(invalid!("log2(U) must be in 1..={MAX_BITS}, got {bits}"));
        }
        let universe = 1u64 << bits;
        if let Some((pos, s)) = symbols.iter().enumerate().find(|(_, &s)| s >= universe) {
            return Err(invalid!("symbol {s} at position {pos} is outside [0, {universe})"));
        }
        Ok(Self { symbols, bits })
    }

    /// Builds a string over `[0, universe)`; `universe` must be a power of two `>= 2`.
    pub fn with_universe(symbols: Vec<u64>, universe: u64) -> Result<Self> {
        if universe < 2 || !universe.is_power_of_two() {
            return Err(invalid!("U must be a power of two >= 2, got {universe}"));
        }
        Self::new(symbols, universe.trailing_zeros())
    }

    pub fn symbols(&self) -> &[u64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `u = log2(U)`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn universe(&self) -> u64 {
        1u64 << self.bits
    }
}

/// What the entries of a [`DistanceArray`] measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    /// `(l_p)^p`, the additive form.
    PowerP(f64),
    /// `l_p` itself.
    Lp(f64),
    /// Mismatch counts.
    Count,
    /// Sums of an arbitrary per-symbol kernel.
    KernelSum,
}

/// One distance per alignment, `n - m + 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceArray {
    values: Vec<f64>,
    scale: Scale,
}

impl DistanceArray {
    pub fn new(values: Vec<f64>, scale: Scale) -> Self {
        Self { values, scale }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Converts p-th powers to `l_p` values; other scales are returned as is.
    pub fn into_lp(self) -> Self {
        match self.scale {
            Scale::PowerP(p) => Self {
                values: self.values.into_iter().map(|v| pow_p(v, 1.0 / p)).collect(),
                scale: Scale::Lp(p),
            },
            _ => self,
        }
    }

    /// Converts `l_p` values to p-th powers; other scales are returned as is.
    pub fn into_powers(self) -> Self {
        match self.scale {
            Scale::Lp(p) => Self {
                values: self.values.into_iter().map(|v| pow_p(v, p)).collect(),
                scale: Scale::PowerP(p),
            },
            _ => self,
        }
    }
}

fn check_shapes(text_len: usize, pattern_len: usize) -> Result<()> {
    if pattern_len == 0 {
        return Err(invalid!("pattern must be non-empty"));
    }
    if pattern_len > text_len {
        return Err(invalid!("pattern length {pattern_len} exceeds text length {text_len}"));
    }
    Ok(())
}

/// `values[i] = sum_j |t[i+j] - p[j]|^p`, by direct summation.
pub fn brute_force_lp(text: &IntString, pattern: &IntString, p: f64) -> Result<DistanceArray> {
    check_shapes(text.len(), pattern.len())?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid!("p must be a positive finite real, got {p}"));
    }
    let pat = pattern.symbols();
    let values = text
        .symbols()
        .windows(pat.len())
        .map(|w| w.iter().zip(pat).map(|(&a, &b)| pow_p(a.abs_diff(b) as f64, p)).sum())
        .collect();
    Ok(DistanceArray::new(values, Scale::PowerP(p)))
}

/// `values[i]` = number of mismatching positions in window `i`.
pub fn brute_force_hamming(text: &IntString, pattern: &IntString) -> Result<DistanceArray> {
    check_shapes(text.len(), pattern.len())?;
    let pat = pattern.symbols();
    let values = text
        .symbols()
        .windows(pat.len())
        .map(|w| w.iter().zip(pat).filter(|(a, b)| a != b).count() as f64)
        .collect();
    Ok(DistanceArray::new(values, Scale::Count))
}

/// How a reduced-alphabet distance is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Backend {
    /// Pick whichever of the other two has the lower operation count.
    #[default]
    Auto,
    /// One blocked FFT correlation per reduced symbol.
    Convolution,
    /// `O(nm)` kernel lookups.
    Direct,
}

/// Evaluation knobs shared by the decomposition engines.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineOptions {
    pub backend: Backend,
    /// Transform length override for the convolution backend.
    pub fft_len: Option<usize>,
}

impl EngineOptions {
    pub fn convolution() -> Self {
        Self {
            backend: Backend::Convolution,
            fft_len: None,
        }
    }

    pub fn direct() -> Self {
        Self {
            backend: Backend::Direct,
            fft_len: None,
        }
    }

    /// Resolves [`Backend::Auto`] for a concrete shape.
    pub fn resolve(&self, text_len: usize, pattern_len: usize, alphabet: usize) -> Result<Backend> {
        Ok(match self.backend {
            Backend::Auto => {
                let plan = BlockPlan::new(text_len, pattern_len, self.fft_len)?;
                let log = plan.fft_len.trailing_zeros().max(1) as f64;
                // Two transforms plus a pointwise product per block, per symbol.
                let fft_cost = alphabet as f64 * plan.blocks as f64 * (2.0 * log + 1.0) * plan.fft_len as f64;
                let direct_cost = plan.output_len() as f64 * pattern_len as f64;
                if direct_cost <= fft_cost {
                    Backend::Direct
                } else {
                    Backend::Convolution
                }
            }
            other => other,
        })
    }
}

/// `out[i] = sum_j kernel(text[i+j], pattern[j])` over already reduced
/// symbols in `[0, alphabet)`.
///
/// With the convolution backend this is one correlation per symbol `c`:
/// the indicator of `text == c` against `kernel(c, pattern[j])`, summed in
/// increasing `c`.
pub fn reduced_distance<K>(
    text: &[u32],
    pattern: &[u32],
    alphabet: usize,
    kernel: K,
    options: &EngineOptions,
    stats: &mut CorrelationStats,
) -> Result<Vec<f64>>
where
    K: Fn(u32, u32) -> f64,
{
    check_shapes(text.len(), pattern.len())?;
    if alphabet == 0 {
        return Err(invalid!("alphabet size must be positive"));
    }
    if text.iter().chain(pattern).any(|&s| s as usize >= alphabet) {
        return Err(invalid!("reduced symbol outside [0, {alphabet})"));
    }
    let out_len = text.len() - pattern.len() + 1;
    let mut out = vec![0.0; out_len];
    match options.resolve(text.len(), pattern.len(), alphabet)? {
        Backend::Direct => {
            for (i, o) in out.iter_mut().enumerate() {
                let window = &text[i..i + pattern.len()];
                *o = window.iter().zip(pattern).map(|(&a, &b)| kernel(a, b)).sum();
            }
            if out.iter().any(|v| !v.is_finite()) {
                return Err(invalid!("kernel produced a non-finite value"));
            }
        }
        Backend::Convolution | Backend::Auto => {
            let mut correlator = Correlator::new(text.len(), pattern.len(), options.fft_len)?;
            let mut indicator = vec![0.0; text.len()];
            let mut column = vec![0.0; pattern.len()];
            for c in 0..alphabet as u32 {
                for (dst, &s) in indicator.iter_mut().zip(text) {
                    *dst = if s == c { 1.0 } else { 0.0 };
                }
                for (dst, &b) in column.iter_mut().zip(pattern) {
                    *dst = kernel(c, b);
                }
                if column.iter().any(|v| !v.is_finite()) {
                    return Err(invalid!("kernel({c}, _) is not finite"));
                }
                correlator.accumulate(&indicator, &column, &mut out);
            }
            stats.merge(correlator.stats());
        }
    }
    Ok(out)
}

/// Exact distance under an arbitrary kernel that only sees reduced symbols:
/// `values[i] = sum_j kernel(reduce_text(t[i+j]), reduce_pattern(p[j]))`.
///
/// Runs `alphabet` blocked correlations, `O(alphabet * n log m)` in total.
pub fn small_alphabet_distance<RT, RP, K>(
    text: &IntString,
    pattern: &IntString,
    reduce_text: RT,
    reduce_pattern: RP,
    kernel: K,
    alphabet: usize,
) -> Result<DistanceArray>
where
    RT: Fn(u64) -> usize,
    RP: Fn(u64) -> usize,
    K: Fn(usize, usize) -> f64,
{
    let mut stats = CorrelationStats::default();
    small_alphabet_distance_with(
        text,
        pattern,
        reduce_text,
        reduce_pattern,
        kernel,
        alphabet,
        &EngineOptions::convolution(),
        &mut stats,
    )
}

/// [`small_alphabet_distance`] with an explicit backend and FFT accounting.
#[allow(clippy::too_many_arguments)]
pub fn small_alphabet_distance_with<RT, RP, K>(
    text: &IntString,
    pattern: &IntString,
    reduce_text: RT,
    reduce_pattern: RP,
    kernel: K,
    alphabet: usize,
    options: &EngineOptions,
    stats: &mut CorrelationStats,
) -> Result<DistanceArray>
where
    RT: Fn(u64) -> usize,
    RP: Fn(u64) -> usize,
    K: Fn(usize, usize) -> f64,
{
    if alphabet == 0 {
        return Err(invalid!("alphabet size must be positive"));
    }
    if alphabet > u32::MAX as usize {
        return Err(out_of_range!("alphabet size {alphabet} too large"));
    }
    let reduce = |s: &[u64], f: &dyn Fn(u64) -> usize| -> Result<Vec<u32>> {
        s.iter()
            .map(|&x| {
                let r = f(x);
                if r < alphabet {
                    Ok(r as u32)
                } else {
                    Err(invalid!("symbol {x} reduces to {r}, outside [0, {alphabet})"))
                }
            })
            .collect()
    };
    let a = reduce(text.symbols(), &reduce_text)?;
    let b = reduce(pattern.symbols(), &reduce_pattern)?;
    let values = reduced_distance(&a, &b, alphabet, |x, y| kernel(x as usize, y as usize), options, stats)?;
    Ok(DistanceArray::new(values, Scale::KernelSum))
}

fn binomial_row(p: u32) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 1..=p as usize {
        let next = row[k - 1] * (p as usize - k + 1) as f64 / k as f64;
        row.push(libm::round(next));
    }
    row
}

/// `values[i] = sum_j (t[i+j] - p[j])^p` for even `p`, through the binomial
/// expansion into `p - 1` correlations of power vectors plus two window sums.
///
/// Both strings are first centred on `U/2`, which leaves every difference
/// unchanged and shrinks the power vectors by `2^p`. The exact result is an
/// integer below `2^53` (enforced by the range guard), so the correlation
/// output is rounded to the nearest integer.
pub fn exact_even_p(text: &IntString, pattern: &IntString, p: u32) -> Result<DistanceArray> {
    exact_even_p_with(text, pattern, p, None, &mut CorrelationStats::default())
}

/// [`exact_even_p`] with a transform-length override and FFT accounting.
pub fn exact_even_p_with(
    text: &IntString,
    pattern: &IntString,
    p: u32,
    fft_len: Option<usize>,
    stats: &mut CorrelationStats,
) -> Result<DistanceArray> {
    check_shapes(text.len(), pattern.len())?;
    if p == 0 || p % 2 == 1 {
        return Err(invalid!("exact_even_p needs an even positive p, got {p}"));
    }
    let bits = text.bits().max(pattern.bits());
    let m = pattern.len();
    let magnitude = libm::log2(m as f64) + (bits as f64) * p as f64;
    if magnitude >= 53.0 {
        return Err(out_of_range!("m * U^p = 2^{magnitude:.1} is not below 2^53"));
    }
    let centre = 1i64 << (bits - 1);
    let t: Vec<i64> = text.symbols().iter().map(|&x| x as i64 - centre).collect();
    let q: Vec<i64> = pattern.symbols().iter().map(|&x| x as i64 - centre).collect();
    let ipow = |x: i64, k: u32| -> i128 { (x as i128).pow(k) };

    let out_len = t.len() - m + 1;
    // k = p: window sums of t^p, exact in integers.
    let mut prefix = Vec::with_capacity(t.len() + 1);
    prefix.push(0i128);
    for &x in &t {
        let last = *prefix.last().unwrap();
        prefix.push(last + ipow(x, p));
    }
    // k = 0: the constant sum of q^p.
    let pattern_term: i128 = q.iter().map(|&y| ipow(y, p)).sum();
    let mut exact_part: Vec<i128> = (0..out_len).map(|i| prefix[i + m] - prefix[i] + pattern_term).collect();

    let binom = binomial_row(p);
    let mut mixed = vec![0.0; out_len];
    let mut correlator = Correlator::new(t.len(), m, fft_len)?;
    let mut tk = vec![0.0; t.len()];
    let mut qk = vec![0.0; m];
    let mut scratch = vec![0.0; out_len];
    for k in 1..p {
        for (dst, &x) in tk.iter_mut().zip(&t) {
            *dst = ipow(x, k) as f64;
        }
        for (dst, &y) in qk.iter_mut().zip(&q) {
            *dst = ipow(y, p - k) as f64;
        }
        scratch.fill(0.0);
        correlator.accumulate(&tk, &qk, &mut scratch);
        let sign = if (p - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        for (acc, v) in mixed.iter_mut().zip(&scratch) {
            *acc += sign * binom[k as usize] * v;
        }
    }
    stats.merge(correlator.stats());

    let values = exact_part
        .iter_mut()
        .zip(&mixed)
        .map(|(e, &v)| {
            let total = *e + libm::round(v) as i128;
            total.max(0) as f64
        })
        .collect();
    Ok(DistanceArray::new(values, Scale::PowerP(p as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u64], bits: u32) -> IntString {
        IntString::new(v.to_vec(), bits).unwrap()
    }

    #[test]
    fn int_string_validation() {
        assert!(IntString::new(vec![4], 2).is_err());
        assert!(IntString::new(vec![3], 0).is_err());
        assert!(IntString::with_universe(vec![1], 6).is_err());
        assert_eq!(IntString::with_universe(vec![1], 8).unwrap().bits(), 3);
    }

    #[test]
    fn brute_force_examples() {
        let t = s(&[3, 1], 2);
        assert_eq!(brute_force_lp(&t, &s(&[1], 2), 1.0).unwrap().values(), [2.0, 0.0]);
        let t = s(&[5, 0, 2], 3);
        assert_eq!(brute_force_lp(&t, &s(&[1, 2], 3), 2.0).unwrap().values(), [20.0, 1.0]);
        assert!(brute_force_lp(&t, &t, 1.5).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(brute_force_lp(&s(&[1], 2), &s(&[1, 2], 2), 1.0).is_err());
        assert!(brute_force_lp(&t, &t, 0.0).is_err());
    }

    #[test]
    fn hamming_examples() {
        let t = s(&[1, 2, 3], 2);
        assert_eq!(brute_force_hamming(&t, &s(&[2, 2], 2)).unwrap().values(), [1.0, 1.0]);
        assert_eq!(brute_force_hamming(&t, &t).unwrap().values(), [0.0]);
        assert!(brute_force_hamming(&s(&[1], 2), &t).is_err());
    }

    #[test]
    fn zero_kernel_gives_zeros() {
        let t = s(&[1, 2, 3, 0, 1], 2);
        let p = s(&[2, 0], 2);
        let d = small_alphabet_distance(&t, &p, |x| x as usize, |x| x as usize, |_, _| 0.0, 4).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn small_alphabet_rejects_bad_alphabet() {
        let t = s(&[1, 2, 3], 2);
        let err = small_alphabet_distance(&t, &t, |x| x as usize, |x| x as usize, |_, _| 1.0, 0);
        assert!(matches!(err, Err(crate::Error::InvalidArgument(_))));
        let err = small_alphabet_distance(&t, &t, |x| x as usize, |x| x as usize, |_, _| 1.0, 2);
        assert!(err.is_err());
    }

    #[test]
    fn even_p_examples() {
        let t = s(&[5, 0, 2], 3);
        let d = exact_even_p(&t, &s(&[1, 2], 3), 2).unwrap();
        assert_eq!(d.values(), [20.0, 1.0]);
        assert!(exact_even_p(&t, &t, 2).unwrap().values() == [0.0]);
        assert!(exact_even_p(&t, &t, 3).is_err());
        assert!(exact_even_p(&t, &t, 0).is_err());
    }

    #[test]
    fn even_p_range_guard() {
        let t = IntString::new(vec![0; 16], 20).unwrap();
        assert!(matches!(exact_even_p(&t, &t, 4), Err(crate::Error::Range(_))));
        assert!(exact_even_p(&t, &t, 2).is_ok());
    }

    #[test]
    fn auto_backend_prefers_direct_for_huge_alphabets() {
        let opts = EngineOptions::default();
        assert_eq!(opts.resolve(1000, 16, 1 << 16).unwrap(), Backend::Direct);
        assert_eq!(opts.resolve(1 << 16, 4096, 4).unwrap(), Backend::Convolution);
    }

    #[test]
    fn scale_conversions() {
        let d = DistanceArray::new(vec![4.0, 0.0], Scale::PowerP(2.0)).into_lp();
        assert_eq!(d.scale(), Scale::Lp(2.0));
        assert_eq!(d.values(), [2.0, 0.0]);
        assert_eq!(d.into_powers().values(), [4.0, 0.0]);
    }
}
