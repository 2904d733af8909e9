use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Serialize, Serializer};

use super::binomial::{FairCoinTails, MAX_EXACT_TRIALS};
use super::{check_levels, check_unit, evaluate_methods, run_trials, ExperimentReport};
use crate::error::{Error, Result};
use crate::pvalue::PValuePair;
use crate::rng::trial_rng;

/// Success probability of every real null hypothesis.
const NULL_SUCCESS: f64 = 0.5;

/// Success probability of synthetic samples for null hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthNull {
    Fixed(f64),
    /// Synthetic nulls use `q_synth_alt`: the synthetic data show signal for
    /// every hypothesis.
    MirrorAlt,
}

impl fmt::Display for SynthNull {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthNull::Fixed(q) => write!(f, "{q}"),
            SynthNull::MirrorAlt => f.write_str("mirror-alt"),
        }
    }
}

impl FromStr for SynthNull {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "mirror-alt" {
            return Ok(SynthNull::MirrorAlt);
        }
        s.parse::<f64>()
            .map(SynthNull::Fixed)
            .map_err(|_| format!("expected a probability or `mirror-alt`, got `{s}`"))
    }
}

impl Serialize for SynthNull {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SynthNull::Fixed(q) => serializer.serialize_f64(*q),
            SynthNull::MirrorAlt => serializer.serialize_str("mirror-alt"),
        }
    }
}

/// Bernoulli experiment: each hypothesis has `n_real` real and `n_synth`
/// synthetic coin flips. Nulls flip with probability 1/2, alternatives with
/// `q_alt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_real: u64,
    pub n_synth: u64,
    pub m: usize,
    pub frac_alt: f64,
    pub q_alt: f64,
    pub q_synth_null: SynthNull,
    pub q_synth_alt: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_real: 200,
            n_synth: 1000,
            m: 1000,
            frac_alt: 0.05,
            q_alt: 0.6,
            q_synth_null: SynthNull::Fixed(0.5),
            q_synth_alt: 0.55,
            alpha: 0.1,
            epsilon: 0.1,
            trials: 100,
            seed: 0,
        }
    }
}

impl SimConfig {
    /// Synthetic nulls carry the alternative signal.
    pub fn worst_case() -> Self {
        SimConfig {
            q_synth_null: SynthNull::MirrorAlt,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (value, name) in [
            (self.n_real, "n_real"),
            (self.n_synth, "n_synth"),
            (self.m as u64, "m"),
            (self.trials as u64, "trials"),
        ] {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        check_unit(self.frac_alt, "frac_alt")?;
        check_unit(self.q_alt, "q_alt")?;
        check_unit(self.q_synth_alt, "q_synth_alt")?;
        if let SynthNull::Fixed(q) = self.q_synth_null {
            check_unit(q, "q_synth_null")?;
        }
        check_levels(self.alpha, self.epsilon)?;
        let pooled = self.n_real + self.n_synth;
        if pooled > MAX_EXACT_TRIALS {
            return Err(Error::TooManyTrials {
                n: pooled,
                max: MAX_EXACT_TRIALS,
            });
        }
        Ok(())
    }

    pub fn num_alternatives(&self) -> usize {
        ((self.frac_alt * self.m as f64).round() as usize).min(self.m)
    }

    pub fn synth_null_success(&self) -> f64 {
        match self.q_synth_null {
            SynthNull::Fixed(q) => q,
            SynthNull::MirrorAlt => self.q_synth_alt,
        }
    }
}

/// Simulated p-value pairs with the ground truth (`true` = null).
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub pairs: Vec<PValuePair>,
    pub null_mask: Vec<bool>,
}

/// Draws trials of the Bernoulli experiment.
///
/// The real p-value applies the randomized binomial test to the real
/// successes; the pooled p-value applies it to real plus synthetic successes
/// over `n_real + n_synth` flips, with its own uniform draw. The first
/// `num_alternatives()` hypotheses are the alternatives.
#[derive(Debug, Clone)]
pub struct BernoulliSampler {
    config: SimConfig,
    real_tails: FairCoinTails,
    pooled_tails: FairCoinTails,
    real: [Binomial; 2],
    synth: [Binomial; 2],
}

impl BernoulliSampler {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let binomial = |n, q| {
            Binomial::new(n, q)
                .map_err(|e| Error::InvalidConfig(format!("binomial({n}, {q}): {e}")))
        };
        Ok(BernoulliSampler {
            config: config.clone(),
            real_tails: FairCoinTails::new(config.n_real)?,
            pooled_tails: FairCoinTails::new(config.n_real + config.n_synth)?,
            real: [
                binomial(config.n_real, NULL_SUCCESS)?,
                binomial(config.n_real, config.q_alt)?,
            ],
            synth: [
                binomial(config.n_synth, config.synth_null_success())?,
                binomial(config.n_synth, config.q_synth_alt)?,
            ],
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn draw(&self, trial: usize) -> SimulatedData {
        let mut rng = trial_rng(self.config.seed, trial as u64);
        let m1 = self.config.num_alternatives();
        let mut pairs = Vec::with_capacity(self.config.m);
        let mut null_mask = Vec::with_capacity(self.config.m);
        for j in 0..self.config.m {
            let alt = usize::from(j < m1);
            let x_real = self.real[alt].sample(&mut rng);
            let x_synth = self.synth[alt].sample(&mut rng);
            let u_real: f64 = rng.random();
            let u_pooled: f64 = rng.random();
            // Counts are within range by construction.
            let p_real = self.real_tails.randomized_pvalue(x_real, u_real).unwrap();
            let p_pooled = self
                .pooled_tails
                .randomized_pvalue(x_real + x_synth, u_pooled)
                .unwrap();
            pairs.push(PValuePair { p_real, p_pooled });
            null_mask.push(alt == 0);
        }
        SimulatedData { pairs, null_mask }
    }
}

/// Runs every trial and aggregates FDP and power per method.
pub fn run_bernoulli_experiment(config: &SimConfig, threads: usize) -> Result<ExperimentReport> {
    let sampler = BernoulliSampler::new(config)?;
    let per_trial = run_trials(config.trials, threads, |trial| {
        let data = sampler.draw(trial);
        evaluate_methods(&data.pairs, &data.null_mask, config.alpha, config.epsilon)
    })?;
    Ok(ExperimentReport::from_trials(per_trial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::fdp_and_power;
    use crate::sim::mean_and_se;
    use crate::sim::Method;
    use crate::stepup::{weighted_synth_bh, StepUpConfig};

    #[test]
    fn defaults_follow_the_reference_setup() {
        let c = SimConfig::default();
        assert_eq!((c.n_real, c.n_synth, c.m), (200, 1000, 1000));
        assert_eq!((c.frac_alt, c.q_alt, c.q_synth_alt), (0.05, 0.6, 0.55));
        assert_eq!((c.alpha, c.epsilon, c.trials), (0.1, 0.1, 100));
        assert_eq!(c.num_alternatives(), 50);
        assert_eq!(SimConfig::worst_case().synth_null_success(), 0.55);
    }

    #[test]
    fn validation() {
        let bad = |f: fn(&mut SimConfig)| {
            let mut c = SimConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.n_real = 0));
        assert!(bad(|c| c.trials = 0));
        assert!(bad(|c| c.q_alt = 1.5));
        assert!(bad(|c| c.q_synth_null = SynthNull::Fixed(-0.1)));
        assert!(bad(|c| c.alpha = 0.0));
        assert!(bad(|c| c.n_synth = 1900));
        assert!(bad(|c| {
            c.alpha = 0.6;
            c.epsilon = 0.5
        }));
        assert!(SimConfig::default().validate().is_ok());
    }

    #[test]
    fn synth_null_parsing() {
        assert_eq!(
            "mirror-alt".parse::<SynthNull>().unwrap(),
            SynthNull::MirrorAlt
        );
        assert_eq!("0.5".parse::<SynthNull>().unwrap(), SynthNull::Fixed(0.5));
        assert!("half".parse::<SynthNull>().is_err());
        assert_eq!(SynthNull::MirrorAlt.to_string(), "mirror-alt");
    }

    #[test]
    fn draws_are_reproducible() {
        let config = SimConfig {
            m: 50,
            trials: 3,
            seed: 11,
            ..SimConfig::default()
        };
        let sampler = BernoulliSampler::new(&config).unwrap();
        assert_eq!(sampler.draw(2), sampler.draw(2));
        assert_ne!(sampler.draw(1), sampler.draw(2));
        let data = sampler.draw(0);
        assert_eq!(data.null_mask.iter().filter(|&&n| !n).count(), 3);
        assert!(data
            .pairs
            .iter()
            .all(|p| (0.0..=1.0).contains(&p.p_real) && (0.0..=1.0).contains(&p.p_pooled)));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let config = SimConfig {
            m: 200,
            trials: 12,
            seed: 3,
            ..SimConfig::default()
        };
        let one = run_bernoulli_experiment(&config, 1).unwrap();
        let four = run_bernoulli_experiment(&config, 4).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn all_null_has_zero_power() {
        let config = SimConfig {
            frac_alt: 0.0,
            trials: 100,
            seed: 17,
            ..SimConfig::default()
        };
        let report = run_bernoulli_experiment(&config, 0).unwrap();
        let s = report.summary(Method::SynthBh);
        assert_eq!(s.power, 0.0);
        assert!(s.fdr <= 0.2 + 3.0 * s.fdr_se, "{s:?}");
        assert!(report.records.iter().all(|r| r.metrics.power == 0.0));
    }

    #[test]
    fn weighted_bound_holds() {
        // Heavier weights on the alternatives; the bound is
        // (m0/m)α + (ε/m) Σ_{nulls} w_j.
        let config = SimConfig {
            trials: 100,
            seed: 99,
            q_synth_null: SynthNull::MirrorAlt,
            ..SimConfig::default()
        };
        let sampler = BernoulliSampler::new(&config).unwrap();
        let m = config.m;
        let m1 = config.num_alternatives();
        let raw: Vec<f64> = (0..m).map(|j| if j < m1 { 4.0 } else { 1.0 }).collect();
        let step = StepUpConfig::new(config.alpha, config.epsilon)
            .unwrap()
            .with_normalized_weights(raw)
            .unwrap();
        let weights = step.weights().unwrap().to_vec();
        let fdp: Vec<f64> = (0..config.trials)
            .map(|t| {
                let data = sampler.draw(t);
                let r = weighted_synth_bh(&data.pairs, &step).unwrap();
                fdp_and_power(&r.rejected, &data.null_mask).unwrap().fdp
            })
            .collect();
        let (mean, se) = mean_and_se(&fdp);
        let null_mass: f64 = weights[m1..].iter().sum();
        let bound =
            (m - m1) as f64 / m as f64 * config.alpha + config.epsilon * null_mass / m as f64;
        assert!(
            mean <= bound + 3.0 * se,
            "mean={mean} se={se} bound={bound}"
        );
    }
}
