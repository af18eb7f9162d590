//! Algorithm selection and execution.
//!
//! The decomposition engines are run level by level (deterministic) or run
//! by run (randomized, Hamming) on the rayon pool. Level arrays are added
//! in the same order as the sequential core routines, so the results are
//! identical to theirs bit for bit.

use std::time::Instant;

use clap::ValueEnum;
use lpdist_core::deterministic::deterministic_params;
use lpdist_core::math::pow_p;
use lpdist_core::pipeline::{combine_levels, finalize_powers, Decomposer, FixedString};
use lpdist_core::randomized::{default_reps, median_combine};
use lpdist_core::{
    brute_force_hamming, brute_force_lp, exact_even_p_with, small_alphabet_distance_with, AmplifiedRequest,
    ApproxRequest, Backend, BlockPlan, CorrelationStats, DecompParams, DistanceArray, EngineOptions, HammingPlan,
    IntString, RandomScale, RandomizedPlan, Scale,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "LPDIST_THREADS";

/// Largest alphabet `exact-alphabet` accepts.
pub const MAX_EXACT_ALPHABET: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Hamming for p = 0, randomized for p < 1, deterministic otherwise.
    Auto,
    ExactBrute,
    ExactAlphabet,
    ExactEvenP,
    ApproxDet,
    ApproxRand,
    ApproxHamming,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::ExactBrute => "exact-brute",
            Algorithm::ExactAlphabet => "exact-alphabet",
            Algorithm::ExactEvenP => "exact-even-p",
            Algorithm::ApproxDet => "approx-det",
            Algorithm::ApproxRand => "approx-rand",
            Algorithm::ApproxHamming => "approx-hamming",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(
            self,
            Algorithm::ExactBrute | Algorithm::ExactAlphabet | Algorithm::ExactEvenP
        )
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::ApproxRand | Algorithm::ApproxHamming)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    #[default]
    Auto,
    Convolution,
    Direct,
}

impl From<BackendChoice> for Backend {
    fn from(b: BackendChoice) -> Self {
        match b {
            BackendChoice::Auto => Backend::Auto,
            BackendChoice::Convolution => Backend::Convolution,
            BackendChoice::Direct => Backend::Direct,
        }
    }
}

pub fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Auto => "auto",
        Backend::Convolution => "convolution",
        Backend::Direct => "direct",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub p: f64,
    pub eps: Option<f64>,
    pub seed: u64,
    pub reps: Option<usize>,
    pub eta: Option<f64>,
    pub backend: BackendChoice,
    pub fft_len: Option<usize>,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, p: f64) -> Self {
        Self {
            algorithm,
            p,
            eps: None,
            seed: 0,
            reps: None,
            eta: None,
            backend: BackendChoice::Auto,
            fft_len: None,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn options(&self) -> EngineOptions {
        EngineOptions {
            backend: self.backend.into(),
            fft_len: self.fft_len,
        }
    }

    /// The concrete algorithm, with [`Algorithm::Auto`] dispatched on `p`.
    pub fn resolved(&self) -> Algorithm {
        match self.algorithm {
            Algorithm::Auto if self.p == 0.0 => Algorithm::ApproxHamming,
            Algorithm::Auto if self.p < 1.0 => Algorithm::ApproxRand,
            Algorithm::Auto => Algorithm::ApproxDet,
            other => other,
        }
    }

    /// Checks that the algorithm accepts these parameters.
    pub fn validate(&self) -> Result<Algorithm> {
        let p = self.p;
        if !(p >= 0.0 && p.is_finite()) {
            return Err(CliError::usage(format!("p must be a finite real >= 0, got {p}")));
        }
        let algorithm = self.resolved();
        let need_eps = || match self.eps {
            Some(_) => Ok(()),
            None => Err(CliError::usage(format!("{} needs --eps", algorithm.name()))),
        };
        match algorithm {
            Algorithm::ExactEvenP if !(p >= 2.0 && p.fract() == 0.0 && p % 2.0 == 0.0) => {
                return Err(CliError::usage(format!(
                    "exact-even-p needs an even integer p >= 2, got {p}"
                )));
            }
            Algorithm::ApproxDet if p < 1.0 => {
                return Err(CliError::usage(format!(
                    "approx-det needs p >= 1, got {p}; use approx-rand for 0 < p < 1 or approx-hamming for p = 0"
                )));
            }
            Algorithm::ApproxRand if !(p > 0.0 && p < 1.0) => {
                return Err(CliError::usage(format!("approx-rand needs 0 < p < 1, got {p}")));
            }
            Algorithm::ApproxHamming if p != 0.0 => {
                return Err(CliError::usage(format!("approx-hamming computes p = 0, got p = {p}")));
            }
            a if !a.is_exact() => need_eps()?,
            _ => {}
        }
        if let Some(reps) = self.reps {
            if !algorithm.is_randomized() {
                return Err(CliError::usage(format!(
                    "--reps only applies to randomized algorithms, not {}",
                    algorithm.name()
                )));
            }
            if reps == 0 || reps % 2 == 0 {
                return Err(CliError::usage(format!("--reps must be odd, got {reps}")));
            }
        }
        if self.eta.is_some() && algorithm.is_exact() {
            return Err(CliError::usage("--eta only applies to the approximate algorithms"));
        }
        if let Some(len) = self.fft_len {
            if !len.is_power_of_two() {
                return Err(CliError::usage(format!("--fft-len must be a power of two, got {len}")));
            }
        }
        Ok(algorithm)
    }
}

/// How the output values are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    /// `l_p` distances.
    Lp,
    /// Mismatch counts (`p = 0`).
    Count,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub values: Vec<f64>,
    pub kind: ValueKind,
    pub backend: Option<Backend>,
    /// Decomposition parameters, for the approximate engines.
    pub params: Option<DecompParams>,
    pub reps: Option<usize>,
    pub blocks: usize,
    pub stats: CorrelationStats,
    /// Block transforms the count model predicts for this run.
    pub predicted_block_ffts: u64,
    pub seconds: f64,
}

impl Outcome {
    pub fn levels(&self) -> usize {
        self.params.as_ref().map_or(0, DecompParams::level_count)
    }

    pub fn alphabet(&self) -> usize {
        self.params.as_ref().map_or(0, DecompParams::alphabet)
    }
}

/// Applies [`THREADS_ENV`] to the global pool; later calls are no-ops.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{THREADS_ENV} must be a thread count, got {value:?}")))?;
    // Fails only when the pool already exists, in which case it stays as is.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn finish(distances: DistanceArray) -> (Vec<f64>, ValueKind) {
    match distances.scale() {
        Scale::Count => (distances.into_values(), ValueKind::Count),
        _ => (distances.into_lp().into_values(), ValueKind::Lp),
    }
}

/// Runs `config` on one text/pattern pair.
pub fn run(text: &IntString, pattern: &IntString, config: &RunConfig) -> Result<Outcome> {
    let algorithm = config.validate()?;
    let (n, m) = (text.len(), pattern.len());
    if m == 0 || m > n {
        return Err(CliError::usage(format!("pattern length must be in 1..={n}, got {m}")));
    }
    let blocks = BlockPlan::new(n, m, config.fft_len)?.blocks;
    let bits = text.bits().max(pattern.bits());
    let options = config.options();
    let start = Instant::now();
    let mut stats = CorrelationStats::default();
    let mut outcome = Outcome {
        algorithm,
        values: Vec::new(),
        kind: ValueKind::Lp,
        backend: None,
        params: None,
        reps: None,
        blocks,
        stats,
        predicted_block_ffts: 0,
        seconds: 0.0,
    };
    let p = config.p;
    let distances = match algorithm {
        Algorithm::ExactBrute if p == 0.0 => brute_force_hamming(text, pattern)?,
        Algorithm::ExactBrute => brute_force_lp(text, pattern, p)?,
        Algorithm::ExactAlphabet => {
            let universe = 1u64 << bits;
            if universe > MAX_EXACT_ALPHABET {
                return Err(CliError::usage(format!(
                    "exact-alphabet runs one correlation per symbol; U = {universe} exceeds {MAX_EXACT_ALPHABET}"
                )));
            }
            let backend = options.resolve(n, m, universe as usize)?;
            outcome.backend = Some(backend);
            if backend == Backend::Convolution {
                outcome.predicted_block_ffts = 2 * universe * blocks as u64;
            }
            let id = |x: u64| x as usize;
            let kernel = |a: usize, b: usize| pow_p(a.abs_diff(b) as f64, p);
            let sums =
                small_alphabet_distance_with(text, pattern, id, id, kernel, universe as usize, &options, &mut stats)?;
            let scale = if p == 0.0 { Scale::Count } else { Scale::PowerP(p) };
            DistanceArray::new(sums.into_values(), scale)
        }
        Algorithm::ExactEvenP => {
            outcome.backend = Some(Backend::Convolution);
            outcome.predicted_block_ffts = 2 * (p as u64 - 1) * blocks as u64;
            exact_even_p_with(text, pattern, p as u32, config.fft_len, &mut stats)?
        }
        Algorithm::ApproxDet => {
            let req = ApproxRequest::new(text, pattern, p, config.eps.unwrap_or_default())?;
            let params = deterministic_params(&req, config.eta)?;
            let decomposer = Decomposer::new(params, options)?;
            let backend = decomposer.backend_for(n, m)?;
            let fixed_text = FixedString::unscaled(text, params.bits());
            let fixed_pattern = FixedString::unscaled(pattern, params.bits());
            let mut sums = parallel_levels(&decomposer, &fixed_text, &fixed_pattern, &mut stats)?;
            finalize_powers(&mut sums, 1.0);
            outcome.record(params, backend, 1);
            DistanceArray::new(sums, Scale::PowerP(p))
        }
        Algorithm::ApproxRand => {
            let reps = config.reps.unwrap_or_else(|| default_reps(n));
            let eps = config.eps.unwrap_or_default();
            AmplifiedRequest::new(text, pattern, p, eps, reps, config.seed)?;
            let plan = RandomizedPlan::new(p, eps, bits, options, config.eta)?;
            let runs = parallel_runs(reps, &mut stats, |run, s| {
                plan.run_powers(text, pattern, RandomScale::derive(config.seed, run, bits), s)
            })?;
            outcome.record(*plan.params(), plan.decomposer().backend_for(n, m)?, reps);
            DistanceArray::new(median_combine(&runs)?, Scale::PowerP(p))
        }
        Algorithm::ApproxHamming => {
            let reps = config.reps.unwrap_or_else(|| default_reps(n));
            let eps = config.eps.unwrap_or_default();
            let plan = HammingPlan::new(eps, bits, options, config.eta)?;
            let runs = parallel_runs(reps, &mut stats, |run, s| {
                plan.run_counts(text, pattern, RandomScale::derive(config.seed, run, bits), s)
            })?;
            outcome.record(*plan.params(), plan.decomposer().backend_for(n, m)?, reps);
            DistanceArray::new(median_combine(&runs)?, Scale::Count)
        }
        Algorithm::Auto => unreachable!("resolved above"),
    };
    let (values, kind) = finish(distances);
    outcome.values = values;
    outcome.kind = kind;
    outcome.stats = stats;
    outcome.seconds = start.elapsed().as_secs_f64();
    Ok(outcome)
}

impl Outcome {
    fn record(&mut self, params: DecompParams, backend: Backend, runs: usize) {
        if backend == Backend::Convolution {
            self.predicted_block_ffts = 2 * (params.level_count() * params.alphabet() * self.blocks * runs) as u64;
        }
        if self.algorithm.is_randomized() {
            self.reps = Some(runs);
        }
        self.params = Some(params);
        self.backend = Some(backend);
    }
}

/// `sum_levels` with the levels spread over the pool.
fn parallel_levels(
    decomposer: &Decomposer,
    text: &FixedString,
    pattern: &FixedString,
    stats: &mut CorrelationStats,
) -> Result<Vec<f64>> {
    let levels: Vec<i32> = decomposer.params().levels().collect();
    let rows = levels
        .into_par_iter()
        .map(|level| {
            let mut s = CorrelationStats::default();
            let row = decomposer.level(text, pattern, level, &mut s)?;
            Ok((row, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut per_level = Vec::with_capacity(rows.len());
    for (row, s) in rows {
        stats.merge(s);
        per_level.push(row);
    }
    Ok(combine_levels(&per_level))
}

fn parallel_runs<F>(reps: usize, stats: &mut CorrelationStats, run: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(u64, &mut CorrelationStats) -> lpdist_core::Result<Vec<f64>> + Sync,
{
    let results = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut s = CorrelationStats::default();
            let values = run(r, &mut s)?;
            Ok((values, s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(results
        .into_iter()
        .map(|(values, s)| {
            stats.merge(s);
            values
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpdist_core::{approx_hamming, approx_lp_ge1_with, approx_lp_le1};

    fn strings() -> (IntString, IntString) {
        let t = IntString::new((0..200).map(|i| (i * 7919 + 13) % 256).collect(), 8).unwrap();
        let q = IntString::new((0..12).map(|i| (i * 31 + 5) % 256).collect(), 8).unwrap();
        (t, q)
    }

    #[test]
    fn dispatch_by_p() {
        let resolve = |p| RunConfig::new(Algorithm::Auto, p).resolved();
        assert_eq!(resolve(0.0), Algorithm::ApproxHamming);
        assert_eq!(resolve(0.5), Algorithm::ApproxRand);
        assert_eq!(resolve(1.0), Algorithm::ApproxDet);
        assert_eq!(resolve(3.0), Algorithm::ApproxDet);
    }

    #[test]
    fn incompatible_parameters_are_usage_errors() {
        let bad = [
            RunConfig::new(Algorithm::ApproxDet, 0.5).with_eps(0.5),
            RunConfig::new(Algorithm::ApproxRand, 1.5).with_eps(0.5),
            RunConfig::new(Algorithm::ApproxHamming, 1.0).with_eps(0.5),
            RunConfig::new(Algorithm::ExactEvenP, 3.0),
            RunConfig::new(Algorithm::ApproxDet, 1.0),
            RunConfig {
                reps: Some(4),
                ..RunConfig::new(Algorithm::ApproxRand, 0.5).with_eps(0.5)
            },
            RunConfig {
                reps: Some(3),
                ..RunConfig::new(Algorithm::ApproxDet, 1.0).with_eps(0.5)
            },
            RunConfig {
                fft_len: Some(48),
                ..RunConfig::new(Algorithm::ExactBrute, 1.0)
            },
            RunConfig::new(Algorithm::ExactBrute, -1.0),
        ];
        for config in bad {
            assert!(matches!(config.validate(), Err(CliError::Usage(_))), "{config:?}");
        }
    }

    #[test]
    fn parallel_runs_match_the_core_engines() {
        let (t, q) = strings();
        let det = RunConfig::new(Algorithm::ApproxDet, 2.0).with_eps(0.25);
        let ours = run(&t, &q, &det).unwrap();
        let req = ApproxRequest::new(&t, &q, 2.0, 0.25).unwrap();
        let core = approx_lp_ge1_with(&req, &EngineOptions::default(), None).unwrap();
        assert_eq!(ours.values, core.distances.values());
        assert_eq!(ours.stats, core.stats);

        let rand = RunConfig {
            seed: 9,
            reps: Some(5),
            ..RunConfig::new(Algorithm::ApproxRand, 0.5).with_eps(0.5)
        };
        let ours = run(&t, &q, &rand).unwrap();
        let core = approx_lp_le1(&AmplifiedRequest::new(&t, &q, 0.5, 0.5, 5, 9).unwrap()).unwrap();
        assert_eq!(ours.values, core.values());

        let ham = RunConfig {
            seed: 4,
            reps: Some(3),
            ..RunConfig::new(Algorithm::ApproxHamming, 0.0).with_eps(0.5)
        };
        let ours = run(&t, &q, &ham).unwrap();
        assert_eq!(ours.kind, ValueKind::Count);
        assert_eq!(ours.values, approx_hamming(&t, &q, 0.5, 4, 3).unwrap().values());
    }

    #[test]
    fn exact_algorithms_agree() {
        let (t, q) = strings();
        let brute = run(&t, &q, &RunConfig::new(Algorithm::ExactBrute, 2.0)).unwrap();
        for algorithm in [Algorithm::ExactAlphabet, Algorithm::ExactEvenP] {
            let other = run(&t, &q, &RunConfig::new(algorithm, 2.0)).unwrap();
            for (a, b) in other.values.iter().zip(&brute.values) {
                assert!((a - b).abs() <= 1e-9 * b.max(1.0));
            }
        }
        let ham = run(&t, &q, &RunConfig::new(Algorithm::ExactAlphabet, 0.0)).unwrap();
        let want = run(&t, &q, &RunConfig::new(Algorithm::ExactBrute, 0.0)).unwrap();
        assert_eq!(ham.kind, ValueKind::Count);
        assert!(ham.values.iter().zip(&want.values).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn predicted_count_matches_measured() {
        let (t, q) = strings();
        let config = RunConfig {
            backend: BackendChoice::Convolution,
            ..RunConfig::new(Algorithm::ApproxDet, 1.0).with_eps(0.5)
        };
        let out = run(&t, &q, &config).unwrap();
        assert_eq!(out.stats.block_ffts, out.predicted_block_ffts);
        assert_eq!(out.stats.correlations as usize, out.levels() * out.alphabet());
    }
}
