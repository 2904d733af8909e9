//! Step-up procedures: Benjamini-Hochberg, SynthBH and weighted SynthBH.
//!
//! SynthBH compares the `k`-th smallest synthetic-powered p-value at guard
//! level `kε/m` against `αk/m` and keeps the largest `k` that passes. The
//! weighted variant scales the guard per hypothesis, `δ_{j,k} = k·w_j·ε/m`.
//!
//! Both are available in two modes. [`Mode::Naive`] runs the rank-adaptive
//! loop literally and costs `Θ(m²)`. [`Mode::Fast`] maps every pair once to
//! the static value `v_j = p_j ∧ (p̃_j ∨ c_j·p_j)` with `c_j = α/(α + w_j·ε)`
//! and runs a single BH pass, which is `O(m log m)`. The two modes select the
//! same `k*` and the same rejection set; in `f64` they can disagree only when
//! a value lands within rounding of a threshold, in which case the fast path
//! is authoritative. Use the [`Exact`](crate::Exact) backend for bit-exact
//! comparisons between them.
//!
//! The FDR bound of the weighted rule grows with the weight mass on the
//! nulls, `(m₀/m)α + (ε/m)Σ_{j∈I₀} w_j`. No cap is placed on individual
//! weights.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pvalue::{check_probability, guarded, PValuePair};
use crate::scalar::Scalar;

/// How the rank-adaptive rule is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Literal loop over every candidate rank.
    Naive,
    /// Static reduction followed by one BH pass.
    #[default]
    Fast,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Naive => "naive",
            Mode::Fast => "fast",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Mode::Naive),
            "fast" => Ok(Mode::Fast),
            other => Err(format!("unknown mode `{other}` (expected naive or fast)")),
        }
    }
}

/// Validated parameters of a step-up run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepUpConfig<T = f64> {
    alpha: T,
    epsilon: T,
    weights: Option<Vec<T>>,
    mode: Mode,
}

impl<T: Scalar> StepUpConfig<T> {
    /// `alpha ∈ (0, 1)`, `epsilon ∈ [0, 1)`, fast mode, no weights.
    pub fn new(alpha: T, epsilon: T) -> Result<Self> {
        check_alpha(alpha)?;
        if epsilon.is_nan() {
            return Err(Error::NotANumber {
                field: "epsilon",
                index: None,
            });
        }
        if !(epsilon >= T::zero() && epsilon < T::one()) {
            return Err(Error::InvalidEpsilon(epsilon.to_f64()));
        }
        Ok(StepUpConfig {
            alpha,
            epsilon,
            weights: None,
            mode: Mode::Fast,
        })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Attach weights. They must be nonnegative and sum to their count.
    pub fn with_weights(mut self, weights: Vec<T>) -> Result<Self> {
        check_weight_entries(&weights)?;
        let sum = weights.iter().fold(T::zero(), |acc, &w| acc + w);
        let expected = T::from_count(weights.len());
        if (sum - expected).abs() > T::weight_sum_tolerance() {
            return Err(Error::WeightSum {
                sum: sum.to_f64(),
                expected: expected.to_f64(),
            });
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Attach weights after rescaling them to sum to their count.
    pub fn with_normalized_weights(mut self, weights: Vec<T>) -> Result<Self> {
        check_weight_entries(&weights)?;
        let sum = weights.iter().fold(T::zero(), |acc, &w| acc + w);
        if sum <= T::zero() {
            return Err(Error::ZeroWeightSum);
        }
        let scale = T::from_count(weights.len()) / sum;
        self.weights = Some(weights.into_iter().map(|w| w * scale).collect());
        Ok(self)
    }

    pub fn without_weights(mut self) -> Self {
        self.weights = None;
        self
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn weights(&self) -> Option<&[T]> {
        self.weights.as_deref()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha.is_nan() {
        return Err(Error::NotANumber {
            field: "alpha",
            index: None,
        });
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidAlpha(alpha.to_f64()));
    }
    Ok(())
}

fn check_weight_entries<T: Scalar>(weights: &[T]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &w) in weights.iter().enumerate() {
        if w.is_nan() {
            return Err(Error::NotANumber {
                field: "weight",
                index: Some(index),
            });
        }
        if !w.is_finite() {
            return Err(Error::NotFinite {
                field: "weight",
                index: Some(index),
                value: w.to_f64(),
            });
        }
        if w < T::zero() {
            return Err(Error::NegativeWeight {
                index,
                value: w.to_f64(),
            });
        }
    }
    Ok(())
}

/// Outcome of a step-up procedure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionResult<T = f64> {
    /// Selected step-up index, `0` when nothing passes.
    pub k_star: usize,
    /// Rejected hypothesis indices (0-based, ascending).
    pub rejected: Vec<usize>,
    /// The per-hypothesis values compared against the thresholds.
    pub modified_pvalues: Vec<T>,
    /// `α·k*/m`, or zero when `k* = 0`.
    pub threshold_used: T,
}

impl<T> RejectionResult<T> {
    pub fn num_hypotheses(&self) -> usize {
        self.modified_pvalues.len()
    }

    pub fn is_rejected(&self, index: usize) -> bool {
        self.rejected.binary_search(&index).is_ok()
    }

    pub fn rejection_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.modified_pvalues.len()];
        for &j in &self.rejected {
            mask[j] = true;
        }
        mask
    }
}

/// Benjamini-Hochberg at level `alpha`.
///
/// `k* = max{k : p_(k) ≤ αk/m}` and every `p_i ≤ p_(k*)` is rejected.
pub fn bh<T: Scalar>(pvalues: &[T], alpha: T) -> Result<RejectionResult<T>> {
    check_alpha(alpha)?;
    if pvalues.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &p) in pvalues.iter().enumerate() {
        check_probability(p, "p", Some(index))?;
    }
    Ok(step_up(pvalues.to_vec(), alpha))
}

/// Unweighted SynthBH. `config` must not carry weights.
pub fn synth_bh<T: Scalar>(
    pairs: &[PValuePair<T>],
    config: &StepUpConfig<T>,
) -> Result<RejectionResult<T>> {
    if config.weights.is_some() {
        return Err(Error::UnexpectedWeights);
    }
    validate_pairs(pairs)?;
    Ok(run_validated(
        pairs,
        config.alpha,
        config.epsilon,
        None,
        config.mode,
    ))
}

/// Weighted SynthBH. `config` must carry one weight per pair.
pub fn weighted_synth_bh<T: Scalar>(
    pairs: &[PValuePair<T>],
    config: &StepUpConfig<T>,
) -> Result<RejectionResult<T>> {
    let weights = config.weights.as_deref().ok_or(Error::MissingWeights)?;
    validate_pairs(pairs)?;
    if weights.len() != pairs.len() {
        return Err(Error::WeightLength {
            expected: pairs.len(),
            got: weights.len(),
        });
    }
    Ok(run_validated(
        pairs,
        config.alpha,
        config.epsilon,
        Some(weights),
        config.mode,
    ))
}

/// Dispatches to [`weighted_synth_bh`] when the config has weights and to
/// [`synth_bh`] otherwise.
pub fn run_procedure<T: Scalar>(
    pairs: &[PValuePair<T>],
    config: &StepUpConfig<T>,
) -> Result<RejectionResult<T>> {
    if config.weights.is_some() {
        weighted_synth_bh(pairs, config)
    } else {
        synth_bh(pairs, config)
    }
}

/// The static values `v_j` the fast path feeds to BH.
pub fn static_values<T: Scalar>(pairs: &[PValuePair<T>], config: &StepUpConfig<T>) -> Vec<T> {
    static_values_raw(
        pairs,
        config.alpha,
        config.epsilon,
        config.weights.as_deref(),
    )
}

fn validate_pairs<T: Scalar>(pairs: &[PValuePair<T>]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::Empty);
    }
    pairs
        .iter()
        .enumerate()
        .try_for_each(|(index, pair)| pair.validate(index))
}

fn run_validated<T: Scalar>(
    pairs: &[PValuePair<T>],
    alpha: T,
    epsilon: T,
    weights: Option<&[T]>,
    mode: Mode,
) -> RejectionResult<T> {
    match mode {
        Mode::Fast => step_up(static_values_raw(pairs, alpha, epsilon, weights), alpha),
        Mode::Naive => naive_step_up(pairs, alpha, epsilon, weights),
    }
}

fn static_values_raw<T: Scalar>(
    pairs: &[PValuePair<T>],
    alpha: T,
    epsilon: T,
    weights: Option<&[T]>,
) -> Vec<T> {
    match weights {
        None => {
            let c = alpha / (alpha + epsilon);
            pairs
                .iter()
                .map(|pair| guarded(pair.p_real, pair.p_pooled, c * pair.p_real))
                .collect()
        }
        Some(weights) => pairs
            .iter()
            .zip(weights)
            .map(|(pair, &w)| {
                let c = alpha / (alpha + w * epsilon);
                guarded(pair.p_real, pair.p_pooled, c * pair.p_real)
            })
            .collect(),
    }
}

#[inline]
fn threshold<T: Scalar>(alpha: T, k: usize, m: T) -> T {
    alpha * T::from_count(k) / m
}

/// BH on `values` (already validated). One sort plus linear scans.
fn step_up<T: Scalar>(values: Vec<T>, alpha: T) -> RejectionResult<T> {
    let m = values.len();
    let m_t = T::from_count(m);
    // Nothing above the largest threshold can be rejected, so only the
    // candidates below it are sorted.
    let largest = threshold(alpha, m, m_t);
    let mut sorted: Vec<T> = values.iter().copied().filter(|&v| v <= largest).collect();
    T::sort(&mut sorted);

    let k_star = (1..=sorted.len())
        .rev()
        .find(|&k| sorted[k - 1] <= threshold(alpha, k, m_t))
        .unwrap_or(0);
    if k_star == 0 {
        return RejectionResult {
            k_star,
            rejected: Vec::new(),
            modified_pvalues: values,
            threshold_used: T::zero(),
        };
    }

    let cutoff = sorted[k_star - 1];
    let rejected = (0..m).filter(|&j| values[j] <= cutoff).collect();
    RejectionResult {
        k_star,
        rejected,
        modified_pvalues: values,
        threshold_used: threshold(alpha, k_star, m_t),
    }
}

/// The rank-adaptive loop, one guard level per candidate rank.
fn naive_step_up<T: Scalar>(
    pairs: &[PValuePair<T>],
    alpha: T,
    epsilon: T,
    weights: Option<&[T]>,
) -> RejectionResult<T> {
    let m = pairs.len();
    let m_t = T::from_count(m);
    let guard_at = |k: usize, out: &mut Vec<T>| {
        let base = T::from_count(k) * epsilon / m_t;
        out.clear();
        out.extend(pairs.iter().enumerate().map(|(j, pair)| {
            let delta = weights.map_or(base, |w| base * w[j]);
            guarded(pair.p_real, pair.p_pooled, pair.p_real - delta)
        }));
    };
    let kth_smallest = |values: &[T], scratch: &mut Vec<T>, k: usize| {
        scratch.clear();
        scratch.extend_from_slice(values);
        let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
        *kth
    };

    let mut values = Vec::with_capacity(m);
    let mut scratch = Vec::with_capacity(m);
    let mut k_star = 0;
    for k in 1..=m {
        guard_at(k, &mut values);
        if kth_smallest(&values, &mut scratch, k) <= threshold(alpha, k, m_t) {
            k_star = k;
        }
    }

    if k_star == 0 {
        return RejectionResult {
            k_star,
            rejected: Vec::new(),
            modified_pvalues: pairs.iter().map(|pair| pair.p_real).collect(),
            threshold_used: T::zero(),
        };
    }
    guard_at(k_star, &mut values);
    let cutoff = kth_smallest(&values, &mut scratch, k_star);
    let rejected = (0..m).filter(|&j| values[j] <= cutoff).collect();
    RejectionResult {
        k_star,
        rejected,
        modified_pvalues: values,
        threshold_used: threshold(alpha, k_star, m_t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use proptest::prelude::*;

    fn pairs(raw: &[(f64, f64)]) -> Vec<PValuePair> {
        raw.iter()
            .map(|&(p, pt)| PValuePair::new(p, pt).unwrap())
            .collect()
    }

    /// Independent BH: try every k against a freshly sorted copy. Uses the
    /// same `p <= alpha * k / m` rounding as the library.
    fn bh_oracle(p: &[f64], alpha: f64) -> (usize, Vec<usize>) {
        let m = p.len();
        let mut sorted = p.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut k_star = 0;
        for k in 1..=m {
            if sorted[k - 1] <= alpha * k as f64 / m as f64 {
                k_star = k;
            }
        }
        if k_star == 0 {
            return (0, vec![]);
        }
        let cut = sorted[k_star - 1];
        (k_star, (0..m).filter(|&i| p[i] <= cut).collect())
    }

    #[test]
    fn bh_examples() {
        let r = bh(&[0.01, 0.02, 0.5], 0.1).unwrap();
        assert_eq!(r.k_star, 2);
        assert_eq!(r.rejected, vec![0, 1]);
        assert!((r.threshold_used - 0.2 / 3.0).abs() < 1e-15);
        assert_eq!(bh_oracle(&[0.01, 0.02, 0.5], 0.1), (2, vec![0, 1]));

        let r = bh(&[1.0, 1.0, 1.0], 0.1).unwrap();
        assert_eq!(r.k_star, 0);
        assert!(r.rejected.is_empty());
        assert_eq!(r.threshold_used, 0.0);

        let r = bh(&[0.0, 0.0, 0.0], 0.05).unwrap();
        assert_eq!(r.k_star, 3);
        assert_eq!(r.rejected, vec![0, 1, 2]);
    }

    #[test]
    fn bh_errors() {
        assert_eq!(bh::<f64>(&[], 0.1), Err(Error::Empty));
        assert_eq!(bh(&[0.1], 0.0), Err(Error::InvalidAlpha(0.0)));
        assert_eq!(bh(&[0.1], 1.0), Err(Error::InvalidAlpha(1.0)));
        assert!(matches!(
            bh(&[0.1], f64::NAN),
            Err(Error::NotANumber { .. })
        ));
        assert!(matches!(
            bh(&[0.1, f64::NAN], 0.1),
            Err(Error::NotANumber { index: Some(1), .. })
        ));
        assert!(matches!(
            bh(&[0.1, 1.2], 0.1),
            Err(Error::Probability { index: Some(1), .. })
        ));
    }

    #[test]
    fn synth_bh_two_pair_example() {
        let input = pairs(&[(0.08, 0.01), (0.9, 0.9)]);
        let config = StepUpConfig::new(0.1, 0.1).unwrap();
        for mode in [Mode::Naive, Mode::Fast] {
            let r = synth_bh(&input, &config.clone().with_mode(mode)).unwrap();
            assert_eq!(r.k_star, 1, "{mode}");
            assert_eq!(r.rejected, vec![0], "{mode}");
        }
        // Fast path: c = 1/2, v = (0.04, 0.9).
        let r = synth_bh(&input, &config).unwrap();
        assert!((r.modified_pvalues[0] - 0.04).abs() < 1e-15);
        assert_eq!(r.modified_pvalues[1], 0.9);
        assert!((r.threshold_used - 0.05).abs() < 1e-15);
        // Naive path at k* = 1: δ = 0.05, p̃^δ = 0.03.
        let r = synth_bh(&input, &config.with_mode(Mode::Naive)).unwrap();
        assert!((r.modified_pvalues[0] - 0.03).abs() < 1e-15);
    }

    #[test]
    fn weighted_example() {
        let input = pairs(&[(0.12, 0.01), (0.5, 0.01)]);
        let config = StepUpConfig::new(0.1, 0.1)
            .unwrap()
            .with_weights(vec![2.0, 0.0])
            .unwrap();
        let r = weighted_synth_bh(&input, &config).unwrap();
        // c = (1/3, 1), v = (0.04, 0.5).
        assert!((r.modified_pvalues[0] - 0.04).abs() < 1e-15);
        assert_eq!(r.modified_pvalues[1], 0.5);
        assert_eq!(r.k_star, 1);
        assert_eq!(r.rejected, vec![0]);
        let r = weighted_synth_bh(&input, &config.with_mode(Mode::Naive)).unwrap();
        assert_eq!(r.k_star, 1);
        assert_eq!(r.rejected, vec![0]);
    }

    #[test]
    fn weight_validation() {
        let base = StepUpConfig::new(0.1, 0.1).unwrap();
        assert!(matches!(
            base.clone().with_weights(vec![1.0, 1.5]),
            Err(Error::WeightSum { .. })
        ));
        assert_eq!(
            base.clone().with_weights(vec![2.5, -0.5]),
            Err(Error::NegativeWeight {
                index: 1,
                value: -0.5
            })
        );
        assert!(base.clone().with_weights(vec![1.0 + 5e-10, 1.0]).is_ok());
        let normalized = base
            .clone()
            .with_normalized_weights(vec![1.0, 3.0])
            .unwrap();
        assert_eq!(normalized.weights().unwrap(), &[0.5, 1.5]);
        assert_eq!(
            base.clone().with_normalized_weights(vec![0.0, 0.0]),
            Err(Error::ZeroWeightSum)
        );

        let input = pairs(&[(0.1, 0.1), (0.2, 0.2), (0.3, 0.3)]);
        let two = base.clone().with_weights(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            weighted_synth_bh(&input, &two),
            Err(Error::WeightLength {
                expected: 3,
                got: 2
            })
        );
        assert_eq!(weighted_synth_bh(&input, &base), Err(Error::MissingWeights));
        assert_eq!(synth_bh(&input, &two), Err(Error::UnexpectedWeights));
    }

    #[test]
    fn config_validation() {
        assert_eq!(StepUpConfig::new(0.0, 0.1), Err(Error::InvalidAlpha(0.0)));
        assert_eq!(StepUpConfig::new(0.1, 1.0), Err(Error::InvalidEpsilon(1.0)));
        assert_eq!(
            StepUpConfig::new(0.1, -0.1),
            Err(Error::InvalidEpsilon(-0.1))
        );
        assert!(StepUpConfig::new(0.1, 0.0).is_ok());
        assert!(matches!(
            StepUpConfig::new(0.1, f64::NAN),
            Err(Error::NotANumber { .. })
        ));
        let config = StepUpConfig::new(0.1, 0.1).unwrap();
        assert_eq!(synth_bh(&[], &config), Err(Error::Empty));
        let bad = [PValuePair {
            p_real: 0.5,
            p_pooled: -0.1,
        }];
        assert!(matches!(
            synth_bh(&bad, &config),
            Err(Error::Probability {
                field: "p_pooled",
                index: Some(0),
                ..
            })
        ));
    }

    #[test]
    fn ties_at_cutoff_are_rejected_together() {
        let r = bh(&[0.02, 0.02, 0.02, 0.9], 0.1).unwrap();
        assert_eq!(r.k_star, 3);
        assert_eq!(r.rejected, vec![0, 1, 2]);
        let input = pairs(&[(0.02, 0.02), (0.02, 0.02), (0.02, 0.02), (0.9, 0.9)]);
        let config = StepUpConfig::new(0.1, 0.1).unwrap();
        for mode in [Mode::Naive, Mode::Fast] {
            let r = synth_bh(&input, &config.clone().with_mode(mode)).unwrap();
            assert_eq!(r.rejected, vec![0, 1, 2]);
        }
    }

    #[test]
    fn single_hypothesis() {
        let input = pairs(&[(0.15, 0.01)]);
        let config = StepUpConfig::new(0.1, 0.1).unwrap();
        for mode in [Mode::Naive, Mode::Fast] {
            let r = synth_bh(&input, &config.clone().with_mode(mode)).unwrap();
            // δ = 0.1, p̃^δ = 0.05 ≤ 0.1; static: c = 0.5, v = 0.075.
            assert_eq!(r.k_star, 1);
        }
        let input = pairs(&[(0.25, 0.01)]);
        for mode in [Mode::Naive, Mode::Fast] {
            let r = synth_bh(&input, &config.clone().with_mode(mode)).unwrap();
            assert_eq!(r.k_star, 0);
            assert_eq!(r.modified_pvalues.len(), 1);
        }
    }

    #[test]
    fn mask_and_lookup() {
        let r = bh(&[0.5, 0.001, 0.9, 0.002], 0.1).unwrap();
        assert_eq!(r.rejected, vec![1, 3]);
        assert_eq!(r.rejection_mask(), vec![false, true, false, true]);
        assert!(r.is_rejected(3));
        assert!(!r.is_rejected(0));
        assert_eq!(r.num_hypotheses(), 4);
    }

    fn grid_pairs(max_m: usize) -> impl Strategy<Value = Vec<(i128, i128)>> {
        prop::collection::vec((0i128..=1000, 0i128..=1000), 1..=max_m)
    }

    fn to_exact(raw: &[(i128, i128)]) -> Vec<PValuePair<Exact>> {
        raw.iter()
            .map(|&(a, b)| PValuePair {
                p_real: Exact::new(a, 1000),
                p_pooled: Exact::new(b, 1000),
            })
            .collect()
    }

    fn to_f64(raw: &[(i128, i128)]) -> Vec<PValuePair> {
        raw.iter()
            .map(|&(a, b)| PValuePair {
                p_real: a as f64 / 1000.0,
                p_pooled: b as f64 / 1000.0,
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn naive_equals_fast_exact(raw in grid_pairs(60), a in 1i128..=30, e in 0i128..=30) {
            let input = to_exact(&raw);
            let config = StepUpConfig::new(Exact::new(a, 100), Exact::new(e, 100)).unwrap();
            let fast = synth_bh(&input, &config).unwrap();
            let naive = synth_bh(&input, &config.clone().with_mode(Mode::Naive)).unwrap();
            prop_assert_eq!(fast.k_star, naive.k_star);
            prop_assert_eq!(&fast.rejected, &naive.rejected);
            prop_assert_eq!(fast.threshold_used, naive.threshold_used);
        }

        #[test]
        fn weighted_naive_equals_fast_exact(
            raw in grid_pairs(40),
            a in 1i128..=30,
            e in 0i128..=30,
            seed_w in prop::collection::vec(0i128..=5, 40),
        ) {
            let m = raw.len();
            let mut w: Vec<i128> = seed_w[..m].to_vec();
            if w.iter().all(|&x| x == 0) { w[0] = 1; }
            let sum: i128 = w.iter().sum();
            let weights: Vec<Exact> = w.iter().map(|&x| Exact::new(x * m as i128, sum)).collect();
            let input = to_exact(&raw);
            let config = StepUpConfig::new(Exact::new(a, 100), Exact::new(e, 100))
                .unwrap()
                .with_weights(weights)
                .unwrap();
            let fast = weighted_synth_bh(&input, &config).unwrap();
            let naive = weighted_synth_bh(&input, &config.clone().with_mode(Mode::Naive)).unwrap();
            prop_assert_eq!(fast.k_star, naive.k_star);
            prop_assert_eq!(&fast.rejected, &naive.rejected);
        }

        #[test]
        fn bh_matches_oracle(raw in grid_pairs(80), a in 1i128..=30) {
            let p: Vec<f64> = to_f64(&raw).iter().map(|x| x.p_real).collect();
            let alpha = a as f64 / 100.0;
            let r = bh(&p, alpha).unwrap();
            let (k, rej) = bh_oracle(&p, alpha);
            prop_assert_eq!(r.k_star, k);
            prop_assert_eq!(r.rejected, rej);
        }

        #[test]
        fn exact_bh_matches_integer_oracle(raw in grid_pairs(80), a in 1i128..=30) {
            // p = n/1000 and alpha = a/100, so m*p <= alpha*k is 100*m*n <= 1000*a*k.
            let m = raw.len() as i128;
            let mut counts: Vec<i128> = raw.iter().map(|&(n, _)| n).collect();
            let p: Vec<Exact> = counts.iter().map(|&n| Exact::new(n, 1000)).collect();
            counts.sort_unstable();
            let k_star = (1..=m)
                .rev()
                .find(|&k| 100 * m * counts[k as usize - 1] <= 1000 * a * k)
                .unwrap_or(0) as usize;
            let r = bh(&p, Exact::new(a, 100)).unwrap();
            prop_assert_eq!(r.k_star, k_star);
            if k_star > 0 {
                let cut = counts[k_star - 1];
                let expected: Vec<usize> =
                    (0..raw.len()).filter(|&i| raw[i].0 <= cut).collect();
                prop_assert_eq!(r.rejected, expected);
            }
        }

        #[test]
        fn result_invariants(raw in grid_pairs(80), a in 1i128..=30, e in 0i128..=30) {
            let input = to_f64(&raw);
            let config = StepUpConfig::new(a as f64 / 100.0, e as f64 / 100.0).unwrap();
            for mode in [Mode::Naive, Mode::Fast] {
                let r = synth_bh(&input, &config.clone().with_mode(mode)).unwrap();
                prop_assert!(r.rejected.len() >= r.k_star);
                if r.k_star == 0 {
                    prop_assert!(r.rejected.is_empty());
                } else {
                    let mut sorted = r.modified_pvalues.clone();
                    sorted.sort_by(f64::total_cmp);
                    let kth = sorted[r.k_star - 1];
                    for &j in &r.rejected {
                        prop_assert!(r.modified_pvalues[j] <= kth);
                    }
                }
                prop_assert!(r.rejected.windows(2).all(|w| w[0] < w[1]));
            }
        }

        #[test]
        fn static_values_never_exceed_real(raw in grid_pairs(80), a in 1i128..=30, e in 0i128..=30) {
            let input = to_f64(&raw);
            let config = StepUpConfig::new(a as f64 / 100.0, e as f64 / 100.0).unwrap();
            let v = static_values(&input, &config);
            for (vj, pair) in v.iter().zip(&input) {
                prop_assert!(*vj <= pair.p_real);
            }
            let p: Vec<f64> = input.iter().map(|x| x.p_real).collect();
            let synth = synth_bh(&input, &config).unwrap();
            let real = bh(&p, config.alpha()).unwrap();
            prop_assert!(synth.k_star >= real.k_star);
        }

        #[test]
        fn deterministic(raw in grid_pairs(80)) {
            let input = to_f64(&raw);
            let config = StepUpConfig::new(0.1, 0.1).unwrap();
            prop_assert_eq!(synth_bh(&input, &config).unwrap(), synth_bh(&input, &config).unwrap());
        }
    }
}
