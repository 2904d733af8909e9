use std::hint::black_box;
use std::time::{Duration, Instant};

use serde::Serialize;
use synthbh::sim::random_pairs;
use synthbh::{synth_bh, Mode, PValuePair, RejectionResult, StepUpConfig};

use crate::args::{BenchArgs, Format};
use crate::commands::{csv_text, to_json};
use crate::error::{CliError, Result};
use crate::io::{format_number, write_all};

/// The naive path is quadratic; it is never timed above this size.
pub const NAIVE_LIMIT: usize = 20_000;
/// Largest allowed ratio time(10^6) / time(10^5) for the fast path.
pub const SCALING_LIMIT: f64 = 15.0;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub m: usize,
    pub k_star: usize,
    pub fast_seconds: f64,
    pub naive_seconds: Option<f64>,
    pub identical: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// time(10^6) / time(10^5) when both sizes were run.
    pub scaling_ratio: Option<f64>,
    pub scaling_limit: f64,
}

fn fastest(
    repeats: usize,
    pairs: &[PValuePair],
    config: &StepUpConfig,
) -> Result<(Duration, RejectionResult)> {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let result = black_box(synth_bh(black_box(pairs), config)?);
        best = best.min(start.elapsed());
        last = Some(result);
    }
    Ok((best, last.expect("at least one repeat")))
}

pub fn run_bench(args: &BenchArgs) -> Result<BenchReport> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(CliError::invalid("--sizes must list positive sizes"));
    }
    if args.repeats == 0 {
        return Err(CliError::invalid("--repeats must be at least 1"));
    }
    if args.naive_max > NAIVE_LIMIT {
        return Err(CliError::invalid(format!(
            "--naive-max {} exceeds {NAIVE_LIMIT}",
            args.naive_max
        )));
    }
    let fast = StepUpConfig::new(args.alpha, args.epsilon)?;
    let naive = fast.clone().with_mode(Mode::Naive);
    let mut rows = Vec::with_capacity(args.sizes.len());
    for &m in &args.sizes {
        let pairs = random_pairs(m, args.seed);
        let (fast_time, fast_result) = fastest(args.repeats, &pairs, &fast)?;
        let (naive_seconds, identical) = if m <= args.naive_max {
            let (t, naive_result) = fastest(args.repeats, &pairs, &naive)?;
            let same = naive_result.k_star == fast_result.k_star
                && naive_result.rejected == fast_result.rejected;
            (Some(t.as_secs_f64()), Some(same))
        } else {
            (None, None)
        };
        rows.push(BenchRow {
            m,
            k_star: fast_result.k_star,
            fast_seconds: fast_time.as_secs_f64(),
            naive_seconds,
            identical,
        });
    }
    let time_at = |m: usize| rows.iter().find(|r| r.m == m).map(|r| r.fast_seconds);
    let scaling_ratio = match (time_at(1_000_000), time_at(100_000)) {
        (Some(big), Some(small)) if small > 0.0 => Some(big / small),
        _ => None,
    };
    Ok(BenchReport {
        rows,
        scaling_ratio,
        scaling_limit: SCALING_LIMIT,
    })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let report = run_bench(args)?;
    let text = match args.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let opt = |x: Option<String>| x.unwrap_or_default();
            let mut out = csv_text(
                &["m", "k_star", "fast_seconds", "naive_seconds", "identical"],
                report.rows.iter().map(|r| {
                    vec![
                        r.m.to_string(),
                        r.k_star.to_string(),
                        format_number(r.fast_seconds),
                        opt(r.naive_seconds.map(format_number)),
                        opt(r.identical.map(|b| b.to_string())),
                    ]
                }),
            )?;
            if let Some(ratio) = report.scaling_ratio {
                out.push_str(&format!(
                    "# scaling_ratio={},limit={},within_limit={}\n",
                    format_number(ratio),
                    format_number(SCALING_LIMIT),
                    ratio < SCALING_LIMIT
                ));
            }
            out
        }
    };
    write_all(args.output.as_deref(), &text)
}
