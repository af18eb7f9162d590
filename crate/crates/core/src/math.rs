//! Small numeric helpers shared by the engines.

use core::cmp::Ordering;

/// `x^p` with the conventions `0^p = 0` for every `p >= 0` (including
/// `0^0 = 0`) and `x^0 = 1` for `x > 0`.
///
/// The zero convention makes the `p = 0` kernels coincide with Hamming
/// indicators.
#[inline]
pub fn pow_p(x: f64, p: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if p == 0.0 {
        1.0
    } else if p == 1.0 {
        x
    } else {
        libm::pow(x, p)
    }
}

/// `2^e` for integer `e`, exact over the whole f64 exponent range we use.
#[inline]
pub fn exp2i(e: i32) -> f64 {
    libm::ldexp(1.0, e)
}

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if libm::fabs(self.sum) >= libm::fabs(value) {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Median of an odd-length slice. Reorders `values`.
pub fn median_odd(values: &mut [f64]) -> f64 {
    debug_assert!(values.len() % 2 == 1);
    let mid = values.len() / 2;
    let (_, m, _) = values.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    *m
}
