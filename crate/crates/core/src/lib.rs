//! Synthetic-powered multiple testing with false discovery rate control.
//!
//! Given, for each of `m` hypotheses, a valid p-value from trusted real data
//! and a second p-value from real data pooled with synthetic or auxiliary
//! data, [`synth_bh`] runs a BH-type step-up procedure that uses the pooled
//! evidence only within a rank-adaptive guard band. Its FDR is at most
//! `(m₀/m)(α + ε)` whatever the quality of the synthetic data, where `ε` is
//! the admission cost chosen by the user.
//!
//! Modules:
//! - [`pvalue`]: the guarded scalar transforms.
//! - [`stepup`]: BH, SynthBH and weighted SynthBH.
//! - [`conformal`]: conformal p-values and outlier detection.
//! - [`sim`]: Monte Carlo experiments and FDP/power metrics.
//!
//! ```
//! use synthbh::{synth_bh, PValuePair, StepUpConfig};
//!
//! let pairs = [
//!     PValuePair::new(0.08, 0.01).unwrap(),
//!     PValuePair::new(0.9, 0.9).unwrap(),
//! ];
//! let config = StepUpConfig::new(0.1, 0.1).unwrap();
//! let result = synth_bh(&pairs, &config).unwrap();
//! assert_eq!(result.rejected, vec![0]);
//! ```

pub mod conformal;
mod error;
pub mod pvalue;
pub mod rng;
mod scalar;
pub mod sim;
pub mod stepup;

pub use conformal::{
    conformal_pvalue, detect_outliers, merged_conformal_pvalue, outlier_pvalues, trim_by_score,
    JitterSpec, ScoreBundle,
};
pub use error::{Error, Result};
pub use pvalue::{static_modified_pvalue, synthetic_powered_pvalue, PValuePair};
pub use scalar::{Exact, Scalar};
pub use sim::{
    fdp_and_power, randomized_binomial_pvalue, run_bernoulli_experiment, run_outlier_experiment,
    ExperimentReport, Method, MethodSummary, OutlierSimConfig, SimConfig, SynthNull, TrialMetrics,
};
pub use stepup::{
    bh, run_procedure, static_values, synth_bh, weighted_synth_bh, Mode, RejectionResult,
    StepUpConfig,
};
