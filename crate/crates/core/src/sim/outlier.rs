use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{check_levels, check_unit, evaluate_methods, run_trials, ExperimentReport};
use crate::conformal::{conformal_pairs, trim_by_score, trim_count, ScoreBundle};
use crate::error::{Error, Result};
use crate::rng::trial_rng;

/// Conformal outlier detection with Gaussian scores.
///
/// Inlier scores are `N(0, 1)` and outlier scores `N(mu_out, 1)`. The
/// auxiliary set of `n_synth` points is contaminated with a fraction
/// `contamination_frac` of outliers and trimmed by `rho` before pooling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierSimConfig {
    pub n_real: usize,
    pub n_synth: usize,
    pub m: usize,
    pub outlier_frac: f64,
    pub contamination_frac: f64,
    pub rho: f64,
    pub mu_out: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for OutlierSimConfig {
    fn default() -> Self {
        OutlierSimConfig {
            n_real: 500,
            n_synth: 2500,
            m: 1000,
            outlier_frac: 0.05,
            contamination_frac: 0.05,
            rho: 0.02,
            mu_out: 3.0,
            alpha: 0.1,
            epsilon: 0.1,
            trials: 100,
            seed: 0,
        }
    }
}

impl OutlierSimConfig {
    pub fn validate(&self) -> Result<()> {
        for (value, name) in [
            (self.n_real, "n_real"),
            (self.m, "m"),
            (self.trials, "trials"),
        ] {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        check_unit(self.outlier_frac, "outlier_frac")?;
        check_unit(self.contamination_frac, "contamination_frac")?;
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidTrim(self.rho));
        }
        if !self.mu_out.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "mu_out = {} must be finite",
                self.mu_out
            )));
        }
        check_levels(self.alpha, self.epsilon)
    }

    pub fn num_outliers(&self) -> usize {
        ((self.outlier_frac * self.m as f64).round() as usize).min(self.m)
    }

    pub fn num_contaminated(&self) -> usize {
        ((self.contamination_frac * self.n_synth as f64).round() as usize).min(self.n_synth)
    }

    /// Size of the auxiliary set after trimming.
    pub fn trimmed_size(&self) -> usize {
        self.n_synth - trim_count(self.n_synth, self.rho)
    }
}

/// Draws score bundles; the first `num_outliers()` test points are outliers.
#[derive(Debug, Clone)]
pub struct OutlierSampler {
    config: OutlierSimConfig,
}

impl OutlierSampler {
    pub fn new(config: &OutlierSimConfig) -> Result<Self> {
        config.validate()?;
        Ok(OutlierSampler {
            config: config.clone(),
        })
    }

    /// Trimmed bundle and ground truth (`true` = inlier, i.e. null).
    pub fn draw(&self, trial: usize) -> Result<(ScoreBundle, Vec<bool>)> {
        let c = &self.config;
        let mut rng = trial_rng(c.seed, trial as u64);
        let mut normal = |shift: f64| shift + rng.sample::<f64, _>(StandardNormal);
        let real: Vec<f64> = (0..c.n_real).map(|_| normal(0.0)).collect();
        let contaminated = c.num_contaminated();
        let aux: Vec<f64> = (0..c.n_synth)
            .map(|i| {
                normal(if i >= c.n_synth - contaminated {
                    c.mu_out
                } else {
                    0.0
                })
            })
            .collect();
        let outliers = c.num_outliers();
        let test: Vec<f64> = (0..c.m)
            .map(|j| normal(if j < outliers { c.mu_out } else { 0.0 }))
            .collect();
        let null_mask = (0..c.m).map(|j| j >= outliers).collect();
        let synth = trim_by_score(&aux, c.rho)?;
        Ok((ScoreBundle::new(real, synth, test)?, null_mask))
    }
}

/// Runs every trial and aggregates FDP and power per method.
pub fn run_outlier_experiment(
    config: &OutlierSimConfig,
    threads: usize,
) -> Result<ExperimentReport> {
    let sampler = OutlierSampler::new(config)?;
    let per_trial = run_trials(config.trials, threads, |trial| {
        let (bundle, null_mask) = sampler.draw(trial)?;
        let pairs = conformal_pairs(&bundle)?;
        evaluate_methods(&pairs, &null_mask, config.alpha, config.epsilon)
    })?;
    Ok(ExperimentReport::from_trials(per_trial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Method;

    #[test]
    fn bundle_shapes() {
        let config = OutlierSimConfig::default();
        let (bundle, mask) = OutlierSampler::new(&config).unwrap().draw(0).unwrap();
        assert_eq!(bundle.real_scores.len(), 500);
        assert_eq!(bundle.synth_scores.len(), 2450);
        assert_eq!(config.trimmed_size(), 2450);
        assert_eq!(bundle.test_scores.len(), 1000);
        assert_eq!(mask.iter().filter(|&&null| !null).count(), 50);
        assert_eq!(config.num_contaminated(), 125);
    }

    #[test]
    fn validation() {
        for c in [
            OutlierSimConfig {
                rho: 1.0,
                ..Default::default()
            },
            OutlierSimConfig {
                n_real: 0,
                ..Default::default()
            },
            OutlierSimConfig {
                mu_out: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn no_auxiliary_data_matches_bh_real() {
        let config = OutlierSimConfig {
            n_synth: 0,
            trials: 10,
            seed: 5,
            ..OutlierSimConfig::default()
        };
        let report = run_outlier_experiment(&config, 0).unwrap();
        let real: Vec<_> = report
            .records_for(Method::BhReal)
            .map(|r| r.metrics)
            .collect();
        let synth: Vec<_> = report
            .records_for(Method::SynthBh)
            .map(|r| r.metrics)
            .collect();
        let pooled: Vec<_> = report
            .records_for(Method::BhSynth)
            .map(|r| r.metrics)
            .collect();
        assert_eq!(real, synth);
        assert_eq!(real, pooled);
    }

    #[test]
    fn untrimmed_synthbh_not_below_bh_real() {
        let config = OutlierSimConfig {
            rho: 0.0,
            trials: 40,
            seed: 8,
            ..OutlierSimConfig::default()
        };
        let report = run_outlier_experiment(&config, 0).unwrap();
        let real = report.summary(Method::BhReal);
        let synth = report.summary(Method::SynthBh);
        assert!(synth.power >= real.power - real.power_se);
        assert!(synth.fdr <= 0.19 + 3.0 * synth.fdr_se);
    }
}
