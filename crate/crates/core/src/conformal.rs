//! Conformal p-values and synthetic-powered outlier detection.
//!
//! Scores follow the convention that larger means more outlier-like. The
//! real-data p-value of a test score `s` is `(#{real ≥ s} + 1) / (n + 1)`;
//! the merged p-value also counts auxiliary scores,
//! `(#{real ≥ s} + #{synth ≥ s} + 1) / (n + N + 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pvalue::PValuePair;
use crate::rng::unit_f64;
use crate::stepup::{synth_bh, RejectionResult, StepUpConfig};

/// Reference, auxiliary and test scores for one detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBundle {
    pub real_scores: Vec<f64>,
    pub synth_scores: Vec<f64>,
    pub test_scores: Vec<f64>,
}

impl ScoreBundle {
    pub fn new(
        real_scores: Vec<f64>,
        synth_scores: Vec<f64>,
        test_scores: Vec<f64>,
    ) -> Result<Self> {
        let bundle = ScoreBundle {
            real_scores,
            synth_scores,
            test_scores,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn validate(&self) -> Result<()> {
        if self.real_scores.is_empty() {
            return Err(Error::EmptyReference);
        }
        if self.test_scores.is_empty() {
            return Err(Error::Empty);
        }
        check_scores(&self.real_scores, "real_scores")?;
        check_scores(&self.synth_scores, "synth_scores")?;
        check_scores(&self.test_scores, "test_scores")
    }
}

fn check_score(value: f64, field: &'static str, index: Option<usize>) -> Result<()> {
    if value.is_nan() {
        return Err(Error::NotANumber { field, index });
    }
    if !value.is_finite() {
        return Err(Error::NotFinite {
            field,
            index,
            value,
        });
    }
    Ok(())
}

fn check_scores(scores: &[f64], field: &'static str) -> Result<()> {
    scores
        .iter()
        .enumerate()
        .try_for_each(|(i, &s)| check_score(s, field, Some(i)))
}

/// Sorted copy of a score set answering `#{score ≥ t}` in `O(log n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedScores {
    sorted: Vec<f64>,
}

impl SortedScores {
    pub fn new(scores: &[f64]) -> Result<Self> {
        check_scores(scores, "scores")?;
        let mut sorted = scores.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(SortedScores { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&s| s < threshold)
    }
}

/// `(#{real ≥ test} + 1) / (n + 1)`.
pub fn conformal_pvalue(real_scores: &[f64], test_score: f64) -> Result<f64> {
    merged_conformal_pvalue(real_scores, &[], test_score)
}

/// `(#{real ≥ test} + #{synth ≥ test} + 1) / (n + N + 1)`.
pub fn merged_conformal_pvalue(
    real_scores: &[f64],
    synth_scores: &[f64],
    test_score: f64,
) -> Result<f64> {
    if real_scores.is_empty() {
        return Err(Error::EmptyReference);
    }
    check_score(test_score, "test_score", None)?;
    check_scores(real_scores, "real_scores")?;
    check_scores(synth_scores, "synth_scores")?;
    let count = real_scores
        .iter()
        .chain(synth_scores)
        .filter(|&&s| s >= test_score)
        .count();
    Ok(lattice(count, real_scores.len() + synth_scores.len()))
}

#[inline]
fn lattice(count: usize, reference_size: usize) -> f64 {
    (count + 1) as f64 / (reference_size + 1) as f64
}

/// Real and merged conformal p-values for every test score.
pub fn conformal_pairs(bundle: &ScoreBundle) -> Result<Vec<PValuePair>> {
    bundle.validate()?;
    let real = SortedScores::new(&bundle.real_scores)?;
    let synth = SortedScores::new(&bundle.synth_scores)?;
    let n = real.len();
    let n_merged = n + synth.len();
    Ok(bundle
        .test_scores
        .iter()
        .map(|&s| {
            let in_real = real.count_at_least(s);
            let in_synth = synth.count_at_least(s);
            PValuePair {
                p_real: lattice(in_real, n),
                p_pooled: lattice(in_real + in_synth, n_merged),
            }
        })
        .collect())
}

/// Drops the `ceil(rho·N)` largest scores and keeps the rest in input order.
///
/// Among exactly tied scores at the boundary the later index is dropped
/// first.
pub fn trim_by_score(synth_scores: &[f64], rho: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidTrim(rho));
    }
    check_scores(synth_scores, "synth_scores")?;
    let drop = trim_count(synth_scores.len(), rho);
    if drop == 0 {
        return Ok(synth_scores.to_vec());
    }
    let mut order: Vec<usize> = (0..synth_scores.len()).collect();
    order.sort_unstable_by(|&a, &b| synth_scores[b].total_cmp(&synth_scores[a]).then(b.cmp(&a)));
    let mut dropped = vec![false; synth_scores.len()];
    for &i in &order[..drop] {
        dropped[i] = true;
    }
    Ok(synth_scores
        .iter()
        .zip(&dropped)
        .filter(|(_, &d)| !d)
        .map(|(&s, _)| s)
        .collect())
}

/// `ceil(rho·n)`, treating products within 1e-9 of an integer as that
/// integer so that `0.07 · 100` drops 7 rather than 8.
pub fn trim_count(n: usize, rho: f64) -> usize {
    let raw = rho * n as f64;
    let nearest = raw.round();
    let count = if (raw - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    (count as usize).min(n)
}

/// Seeded tie-breaking noise added to every score before ranking.
///
/// Each score is shifted by `u · magnitude · range` with `u` uniform on
/// `[-1, 1)`, where `range` is the spread of all scores in the bundle (or 1
/// when every score is equal). The draw for a score depends only on the seed,
/// the role of its score set and its index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterSpec {
    pub seed: u64,
    pub relative_magnitude: f64,
}

impl JitterSpec {
    pub fn new(seed: u64) -> Self {
        JitterSpec {
            seed,
            relative_magnitude: 1e-9,
        }
    }

    pub fn apply(&self, bundle: &ScoreBundle) -> ScoreBundle {
        let all = bundle
            .real_scores
            .iter()
            .chain(&bundle.synth_scores)
            .chain(&bundle.test_scores);
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
        let range = if hi > lo { hi - lo } else { 1.0 };
        let scale = self.relative_magnitude * range;
        let jitter = |scores: &[f64], role: u64| -> Vec<f64> {
            scores
                .iter()
                .enumerate()
                .map(|(i, &s)| s + scale * (2.0 * unit_f64(self.seed, role, i as u64) - 1.0))
                .collect()
        };
        ScoreBundle {
            real_scores: jitter(&bundle.real_scores, 0),
            synth_scores: jitter(&bundle.synth_scores, 1),
            test_scores: jitter(&bundle.test_scores, 2),
        }
    }
}

/// Conformal p-values from `bundle` fed to SynthBH.
pub fn detect_outliers(
    bundle: &ScoreBundle,
    config: &StepUpConfig,
    jitter: Option<&JitterSpec>,
) -> Result<RejectionResult> {
    let pairs = outlier_pvalues(bundle, jitter)?;
    synth_bh(&pairs, config)
}

/// The `(p_j, p̃_j)` pairs used by [`detect_outliers`].
pub fn outlier_pvalues(
    bundle: &ScoreBundle,
    jitter: Option<&JitterSpec>,
) -> Result<Vec<PValuePair>> {
    bundle.validate()?;
    match jitter {
        Some(spec) => conformal_pairs(&spec.apply(bundle)),
        None => conformal_pairs(bundle),
    }
}
