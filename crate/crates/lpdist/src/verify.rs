//! Approximate run against the brute-force oracle, position by position.

use lpdist_core::{brute_force_hamming, brute_force_lp, IntString};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format::Float17;
use crate::run::{run, Algorithm, RunConfig};

/// Largest `n * m` the oracle is run on.
pub const ORACLE_LIMIT: u64 = 100_000_000;

/// Relative tolerance used for the exact algorithms.
pub const EXACT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct PositionError {
    pub index: usize,
    pub exact: Float17,
    pub approx: Float17,
    pub rel_error: Float17,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproxReport {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub eps: Option<f64>,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub max_rel_error: Float17,
    pub mean_rel_error: Float17,
    pub failures: usize,
    pub pass: bool,
    pub positions: Vec<PositionError>,
}

/// `|approx - exact| / exact`; zero when both vanish and infinite when only
/// the exact value does.
pub fn relative_error(approx: f64, exact: f64) -> f64 {
    let diff = (approx - exact).abs();
    if diff == 0.0 {
        0.0
    } else if exact == 0.0 {
        f64::INFINITY
    } else {
        diff / exact.abs()
    }
}

/// Runs `config` and the oracle. `corrupt` replaces one approximate value
/// `v` by `4v + 1` before comparing, to exercise the failure path.
pub fn verify(
    text: &IntString,
    pattern: &IntString,
    config: &RunConfig,
    corrupt: Option<usize>,
) -> Result<ApproxReport> {
    let (n, m) = (text.len(), pattern.len());
    if (n as u64).saturating_mul(m as u64) > ORACLE_LIMIT {
        return Err(CliError::usage(format!(
            "n * m = {} exceeds the oracle limit {ORACLE_LIMIT}; verify on a smaller instance or a prefix of the text",
            n as u64 * m as u64
        )));
    }
    let mut outcome = run(text, pattern, config)?;
    let exact = if config.p == 0.0 {
        brute_force_hamming(text, pattern)?
    } else {
        brute_force_lp(text, pattern, config.p)?.into_lp()
    };
    if let Some(i) = corrupt {
        let v = outcome
            .values
            .get_mut(i)
            .ok_or_else(|| CliError::usage(format!("corrupt index {i} is outside 0..{}", n - m + 1)))?;
        *v = 4.0 * *v + 1.0;
    }
    let algorithm = outcome.algorithm;
    let tolerance = if algorithm.is_exact() {
        EXACT_TOLERANCE
    } else {
        config.eps.unwrap_or_default()
    };
    let errors: Vec<f64> = outcome
        .values
        .iter()
        .zip(exact.values())
        .map(|(&a, &e)| relative_error(a, e))
        .collect();
    let max = errors.iter().copied().fold(0.0, f64::max);
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    let failures = errors.iter().filter(|&&e| e > tolerance).count();
    let positions = errors
        .iter()
        .enumerate()
        .map(|(index, &e)| PositionError {
            index,
            exact: Float17(exact.values()[index]),
            approx: Float17(outcome.values[index]),
            rel_error: Float17(e),
        })
        .collect();
    Ok(ApproxReport {
        algorithm,
        n,
        m,
        p: config.p,
        eps: config.eps,
        tolerance,
        seed: algorithm.is_randomized().then_some(config.seed),
        reps: outcome.reps,
        max_rel_error: Float17(max),
        mean_rel_error: Float17(mean),
        failures,
        pass: failures == 0,
        positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_strings_pass_with_zero_error() {
        let t = IntString::new(vec![4, 1, 7, 7, 0], 3).unwrap();
        let report = verify(&t, &t, &RunConfig::new(Algorithm::Auto, 1.5).with_eps(0.5), None).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_rel_error, Float17(0.0));
        assert_eq!(report.seed, None);
    }

    #[test]
    fn corruption_fails() {
        let t = IntString::new(vec![40, 1, 7, 63, 0, 3], 6).unwrap();
        let q = IntString::new(vec![1, 7], 6).unwrap();
        let config = RunConfig {
            seed: 12,
            ..RunConfig::new(Algorithm::ApproxRand, 0.5).with_eps(0.5)
        };
        let clean = verify(&t, &q, &config, None).unwrap();
        assert_eq!(clean.seed, Some(12));
        let bad = verify(&t, &q, &config, Some(2)).unwrap();
        assert!(!bad.pass);
        assert!(verify(&t, &q, &config, Some(99)).is_err());
    }

    #[test]
    fn relative_error_edge_cases() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert_eq!(relative_error(1.0, 0.0), f64::INFINITY);
        assert_eq!(relative_error(1.5, 2.0), 0.25);
    }
}
