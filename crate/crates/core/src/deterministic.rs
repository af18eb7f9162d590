//! Deterministic `(1 + eps)`-approximate `l_p` distances for `p >= 1`.
//!
//! Runs the level decomposition with `eta = eps / 128` on the unscaled
//! strings and takes the `1/p` root of the summed levels. Per character
//! pair the summed `ĝ_i` stay within `(32 p eta + p/U) |x - y|^p` of the
//! truth, i.e. within `p * eps / 2` relatively once `eps >= 4/U`, which is
//! enough for a `(1 +- eps)` bound on `l_p` when `eps <= 1/p`.

use crate::convolution::CorrelationStats;
use crate::decomposition::DecompParams;
use crate::error::{invalid, Result};
use crate::exact::{Backend, DistanceArray, EngineOptions, IntString, Scale};
use crate::pipeline::{finalize_powers, Decomposer, FixedString};

/// Denominator of the default `eta = eps / 128`.
pub const ETA_DIVISOR: f64 = 128.0;

/// Validated input of [`approx_lp_ge1`].
#[derive(Debug, Clone, Copy)]
pub struct ApproxRequest<'a> {
    text: &'a IntString,
    pattern: &'a IntString,
    p: f64,
    eps: f64,
}

impl<'a> ApproxRequest<'a> {
    /// Requires `p >= 1`, `4/U <= eps <= 1/p` and `1 <= m <= n`.
    pub fn new(text: &'a IntString, pattern: &'a IntString, p: f64, eps: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid!("the deterministic engine needs p >= 1, got {p}"));
        }
        if !(eps > 0.0 && eps <= 1.0 / p) {
            return Err(invalid!("eps must lie in (0, 1/p] = (0, {}], got {eps}", 1.0 / p));
        }
        let universe = text.universe().max(pattern.universe());
        if eps < 4.0 / universe as f64 {
            return Err(invalid!(
                "eps = {eps} is below 4/U = {}; at that precision compute the distances exactly instead",
                4.0 / universe as f64
            ));
        }
        if pattern.is_empty() || pattern.len() > text.len() {
            return Err(invalid!("pattern length must be in 1..={}", text.len()));
        }
        Ok(Self { text, pattern, p, eps })
    }

    pub fn text(&self) -> &'a IntString {
        self.text
    }

    pub fn pattern(&self) -> &'a IntString {
        self.pattern
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn bits(&self) -> u32 {
        self.text.bits().max(self.pattern.bits())
    }
}

/// Result of an approximate run with its accounting.
#[derive(Debug, Clone)]
pub struct ApproxOutput {
    pub distances: DistanceArray,
    pub params: DecompParams,
    pub backend: Backend,
    pub stats: CorrelationStats,
}

/// Decomposition parameters used for a request; `eta` overrides `eps/128`.
pub fn deterministic_params(req: &ApproxRequest<'_>, eta: Option<f64>) -> Result<DecompParams> {
    let eta = eta.unwrap_or(req.eps / ETA_DIVISOR);
    DecompParams::new(req.p, req.eps, eta, req.bits(), false)
}

/// `(1 + eps)`-approximate `l_p` text-to-pattern distance, `p >= 1`.
pub fn approx_lp_ge1(req: &ApproxRequest<'_>) -> Result<DistanceArray> {
    Ok(approx_lp_ge1_with(req, &EngineOptions::default(), None)?.distances)
}

/// [`approx_lp_ge1`] with backend selection, optional `eta` override and
/// FFT accounting.
pub fn approx_lp_ge1_with(req: &ApproxRequest<'_>, options: &EngineOptions, eta: Option<f64>) -> Result<ApproxOutput> {
    let params = deterministic_params(req, eta)?;
    let decomposer = Decomposer::new(params, *options)?;
    let text = FixedString::unscaled(req.text, params.bits());
    let pattern = FixedString::unscaled(req.pattern, params.bits());
    let mut stats = CorrelationStats::default();
    let mut sums = decomposer.sum_levels(&text, &pattern, &mut stats)?;
    finalize_powers(&mut sums, 1.0);
    Ok(ApproxOutput {
        distances: DistanceArray::new(sums, Scale::PowerP(req.p)).into_lp(),
        params,
        backend: decomposer.backend_for(text.len(), pattern.len())?,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_lp;
    use alloc::vec;

    fn s(v: &[u64], bits: u32) -> IntString {
        IntString::new(v.to_vec(), bits).unwrap()
    }

    #[test]
    fn identical_strings_give_zero() {
        let t = s(&[3, 9, 200, 17, 0, 255], 8);
        for options in [EngineOptions::direct(), EngineOptions::convolution()] {
            let req = ApproxRequest::new(&t, &t, 2.0, 0.5).unwrap();
            let out = approx_lp_ge1_with(&req, &options, None).unwrap();
            assert_eq!(out.distances.values(), [0.0]);
        }
    }

    #[test]
    fn request_validation() {
        let t = s(&[1, 2, 3, 4], 6);
        let p = s(&[1, 2], 6);
        assert!(ApproxRequest::new(&t, &p, 0.5, 0.1).is_err());
        assert!(ApproxRequest::new(&t, &p, 2.0, 0.6).is_err());
        assert!(ApproxRequest::new(&t, &p, 1.0, 0.0).is_err());
        // 4/U = 1/16
        assert!(ApproxRequest::new(&t, &p, 1.0, 0.05).is_err());
        assert!(ApproxRequest::new(&p, &t, 1.0, 0.1).is_err());
        assert!(ApproxRequest::new(&t, &p, 1.0, 0.1).is_ok());
    }

    #[test]
    fn small_instance_within_eps() {
        let t = s(&[5, 0, 2, 60, 33, 33, 7], 6);
        let p = s(&[1, 2, 40], 6);
        let exact = brute_force_lp(&t, &p, 1.5).unwrap().into_lp();
        let req = ApproxRequest::new(&t, &p, 1.5, 0.5).unwrap();
        let approx = approx_lp_ge1(&req).unwrap();
        for (a, e) in approx.values().iter().zip(exact.values()) {
            assert!((a - e).abs() <= 0.5 * e, "{a} vs {e}");
        }
    }

    #[test]
    fn correlation_count_model() {
        let t = IntString::new((0..100).map(|i| (i * 7) % 16).collect(), 4).unwrap();
        let p = IntString::new(vec![3, 1, 4, 1, 5], 4).unwrap();
        let req = ApproxRequest::new(&t, &p, 1.0, 0.5).unwrap();
        let out = approx_lp_ge1_with(&req, &EngineOptions::convolution(), None).unwrap();
        let levels = out.params.level_count() as u64;
        let alphabet = out.params.alphabet() as u64;
        assert_eq!(alphabet, 256);
        assert_eq!(out.stats.correlations, levels * alphabet);
        // fft_len 16, step 12, ceil(96 / 12) = 8 blocks
        assert_eq!(out.stats.block_ffts, 2 * levels * alphabet * 8);
    }
}
