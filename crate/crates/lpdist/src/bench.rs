//! Timing and transform counts over a grid of sizes.

use std::fmt::Write as _;

use lpdist_core::IntString;

use crate::error::Result;
use crate::format::format_float;
use crate::gen::{generate, Distribution};
use crate::run::{backend_name, run, Outcome, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub bits: u32,
    pub p: f64,
    pub eps: Option<f64>,
    pub outcome: Outcome,
    /// Fastest of the repeats.
    pub seconds: f64,
}

pub const CSV_HEADER: &str =
    "n,m,u,p,eps,algorithm,backend,levels,alphabet,blocks,correlations,block_ffts,predicted,seconds";

impl BenchRow {
    pub fn csv(&self) -> String {
        let o = &self.outcome;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.bits,
            self.p,
            self.eps.map(|e| e.to_string()).unwrap_or_default(),
            o.algorithm.name(),
            o.backend.map(backend_name).unwrap_or("none"),
            o.levels(),
            o.alphabet(),
            o.blocks,
            o.stats.correlations,
            o.stats.block_ffts,
            o.predicted_block_ffts,
            format_float(self.seconds),
        )
    }
}

/// Runs `config` on a seeded uniform instance `repeats` times.
pub fn bench_case(n: usize, m: usize, bits: u32, config: &RunConfig, repeats: usize, seed: u64) -> Result<BenchRow> {
    let (text, pattern) = generate(n, m, 1 << bits, Distribution::Uniform, seed)?;
    bench_strings(&text.string, &pattern.string, config, repeats)
}

pub fn bench_strings(text: &IntString, pattern: &IntString, config: &RunConfig, repeats: usize) -> Result<BenchRow> {
    let mut best: Option<Outcome> = None;
    for _ in 0..repeats.max(1) {
        let outcome = run(text, pattern, config)?;
        if best.as_ref().is_none_or(|b| outcome.seconds < b.seconds) {
            best = Some(outcome);
        }
    }
    let outcome = best.expect("at least one repeat");
    Ok(BenchRow {
        n: text.len(),
        m: pattern.len(),
        bits: text.bits().max(pattern.bits()),
        p: config.p,
        eps: config.eps,
        seconds: outcome.seconds,
        outcome,
    })
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(out, "{}", row.csv()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::{Algorithm, BackendChoice};

    #[test]
    fn counts_scale_with_n_and_inverse_eps() {
        let config = |eps| RunConfig {
            backend: BackendChoice::Convolution,
            ..RunConfig::new(Algorithm::ApproxDet, 1.0).with_eps(eps)
        };
        let a = bench_case(1024, 16, 4, &config(0.5), 1, 1).unwrap();
        let b = bench_case(2048, 16, 4, &config(0.5), 1, 1).unwrap();
        let c = bench_case(1024, 16, 4, &config(0.25), 1, 1).unwrap();
        let ffts = |r: &BenchRow| r.outcome.stats.block_ffts as f64;
        assert!((ffts(&b) / ffts(&a) - 2.0).abs() < 0.05);
        assert_eq!(c.outcome.stats.block_ffts, 2 * a.outcome.stats.block_ffts);
        for r in [&a, &b, &c] {
            assert_eq!(r.outcome.stats.block_ffts, r.outcome.predicted_block_ffts);
        }
        let csv = render_csv(&[a]);
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(
            csv.lines().nth(1).unwrap().split(',').count(),
            CSV_HEADER.split(',').count()
        );
    }
}
