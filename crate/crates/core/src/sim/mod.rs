//! Monte Carlo experiments comparing SynthBH with the BH baselines.
//!
//! Every experiment runs four methods on the same simulated data:
//! BH on the real p-values at `α`, BH on the real p-values at `α + ε`, BH on
//! the pooled p-values at `α`, and SynthBH at `(α, ε)`. Trials are
//! independent and may run on several threads; each trial seeds its own
//! generator from the master seed and its index, and results are gathered in
//! trial order, so metrics are bit-identical for any thread count.

mod bernoulli;
mod binomial;
mod metrics;
mod outlier;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pvalue::PValuePair;
use crate::rng::trial_rng;
use crate::stepup::{bh, synth_bh, StepUpConfig};

pub use bernoulli::{run_bernoulli_experiment, BernoulliSampler, SimConfig, SynthNull};
pub use binomial::{randomized_binomial_pvalue, FairCoinTails, MAX_EXACT_TRIALS};
pub use metrics::{fdp_and_power, mean_and_se, pairwise_sum, TrialMetrics};
pub use outlier::{run_outlier_experiment, OutlierSampler, OutlierSimConfig};

/// Procedures compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "bh-real")]
    BhReal,
    #[serde(rename = "bh-real+eps")]
    BhRealPlusEps,
    #[serde(rename = "bh-synth")]
    BhSynth,
    #[serde(rename = "synthbh")]
    SynthBh,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::BhReal,
        Method::BhRealPlusEps,
        Method::BhSynth,
        Method::SynthBh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::BhReal => "bh-real",
            Method::BhRealPlusEps => "bh-real+eps",
            Method::BhSynth => "bh-synth",
            Method::SynthBh => "synthbh",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// One method's metrics on one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub method: Method,
    pub trial: usize,
    #[serde(flatten)]
    pub metrics: TrialMetrics,
}

/// Aggregate over trials for one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub trials: usize,
    /// Mean FDP.
    pub fdr: f64,
    pub fdr_se: f64,
    pub power: f64,
    pub power_se: f64,
    pub mean_rejections: f64,
}

/// Per-trial records (trial-major, methods in [`Method::ALL`] order) and
/// per-method summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<MethodSummary>,
}

impl ExperimentReport {
    pub fn summary(&self, method: Method) -> &MethodSummary {
        self.summaries
            .iter()
            .find(|s| s.method == method)
            .expect("every method is summarized")
    }

    pub fn records_for(&self, method: Method) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    fn from_trials(per_trial: Vec<[TrialMetrics; 4]>) -> Self {
        let records = per_trial
            .iter()
            .enumerate()
            .flat_map(|(trial, metrics)| {
                Method::ALL
                    .into_iter()
                    .zip(metrics)
                    .map(move |(method, &metrics)| TrialRecord {
                        method,
                        trial,
                        metrics,
                    })
            })
            .collect();
        let summaries = Method::ALL
            .into_iter()
            .enumerate()
            .map(|(i, method)| {
                let fdp: Vec<f64> = per_trial.iter().map(|t| t[i].fdp).collect();
                let power: Vec<f64> = per_trial.iter().map(|t| t[i].power).collect();
                let rejections: Vec<f64> =
                    per_trial.iter().map(|t| t[i].rejections as f64).collect();
                let (fdr, fdr_se) = mean_and_se(&fdp);
                let (power, power_se) = mean_and_se(&power);
                MethodSummary {
                    method,
                    trials: per_trial.len(),
                    fdr,
                    fdr_se,
                    power,
                    power_se,
                    mean_rejections: pairwise_sum(&rejections) / per_trial.len() as f64,
                }
            })
            .collect();
        ExperimentReport { records, summaries }
    }
}

/// Runs the four methods on one set of pairs.
pub fn evaluate_methods(
    pairs: &[PValuePair],
    null_mask: &[bool],
    alpha: f64,
    epsilon: f64,
) -> Result<[TrialMetrics; 4]> {
    let real: Vec<f64> = pairs.iter().map(|p| p.p_real).collect();
    let pooled: Vec<f64> = pairs.iter().map(|p| p.p_pooled).collect();
    let config = StepUpConfig::new(alpha, epsilon)?;
    let rejected = [
        bh(&real, alpha)?.rejected,
        bh(&real, alpha + epsilon)?.rejected,
        bh(&pooled, alpha)?.rejected,
        synth_bh(pairs, &config)?.rejected,
    ];
    let mut out = [TrialMetrics {
        fdp: 0.0,
        power: 0.0,
        rejections: 0,
    }; 4];
    for (slot, r) in out.iter_mut().zip(&rejected) {
        *slot = fdp_and_power(r, null_mask)?;
    }
    Ok(out)
}

/// Runs `trials` independent trials on `threads` workers (0 means the rayon
/// default) and returns results in trial order.
fn run_trials<F>(trials: usize, threads: usize, trial: F) -> Result<Vec<[TrialMetrics; 4]>>
where
    F: Fn(usize) -> Result<[TrialMetrics; 4]> + Sync,
{
    let run = || (0..trials).into_par_iter().map(&trial).collect();
    if threads == 0 {
        return run();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
        .install(run)
}

/// Synthetic workload of `m` pairs: 95% nulls with independent uniform real
/// and pooled p-values, 5% signals with small p-values.
pub fn random_pairs(m: usize, seed: u64) -> Vec<PValuePair> {
    let mut rng = trial_rng(seed, u64::MAX);
    (0..m)
        .map(|_| {
            let signal = rng.random::<f64>() < 0.05;
            let scale = if signal { 1e-3 } else { 1.0 };
            PValuePair {
                p_real: scale * rng.random::<f64>(),
                p_pooled: scale * rng.random::<f64>(),
            }
        })
        .collect()
}

fn check_unit(value: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidConfig(format!(
            "{name} = {value} must lie in [0, 1]"
        )));
    }
    Ok(())
}

fn check_levels(alpha: f64, epsilon: f64) -> Result<()> {
    StepUpConfig::new(alpha, epsilon)?;
    if alpha + epsilon >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "alpha + epsilon = {} must be below 1 for the relaxed BH baseline",
            alpha + epsilon
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bh".parse::<Method>().is_err());
    }

    #[test]
    fn report_layout() {
        let t = |x: f64| TrialMetrics {
            fdp: x,
            power: 1.0 - x,
            rejections: 2,
        };
        let report = ExperimentReport::from_trials(vec![[t(0.0), t(0.1), t(0.2), t(0.3)]; 3]);
        assert_eq!(report.records.len(), 12);
        assert_eq!(report.records[5].trial, 1);
        assert_eq!(report.records[5].method, Method::BhRealPlusEps);
        let s = report.summary(Method::SynthBh);
        assert_eq!(s.trials, 3);
        assert!((s.fdr - 0.3).abs() < 1e-15);
        assert_eq!(s.fdr_se, 0.0);
        assert_eq!(s.mean_rejections, 2.0);
        assert_eq!(report.records_for(Method::BhSynth).count(), 3);
    }
}
