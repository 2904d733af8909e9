use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the testing procedures and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field}{} is NaN", fmt_index(*.index))]
    NotANumber {
        field: &'static str,
        index: Option<usize>,
    },
    #[error("{field}{} = {value} is not a probability in [0, 1]", fmt_index(*.index))]
    Probability {
        field: &'static str,
        index: Option<usize>,
        value: f64,
    },
    #[error("{field}{} = {value} is not finite", fmt_index(*.index))]
    NotFinite {
        field: &'static str,
        index: Option<usize>,
        value: f64,
    },
    #[error("delta must be nonnegative, got {0}")]
    NegativeDelta(f64),
    #[error("shrinkage ratio must lie in (0, 1], got {0}")]
    InvalidRatio(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("epsilon must lie in [0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("no hypotheses supplied")]
    Empty,
    #[error("expected {expected} weights, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight[{index}] = {value} is negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected {expected}")]
    WeightSum { sum: f64, expected: f64 },
    #[error("weights sum to zero and cannot be normalized")]
    ZeroWeightSum,
    #[error("the weighted procedure requires a weight vector")]
    MissingWeights,
    #[error("weights were supplied to the unweighted procedure")]
    UnexpectedWeights,
    #[error("reference score set is empty")]
    EmptyReference,
    #[error("trimming proportion must lie in [0, 1), got {0}")]
    InvalidTrim(f64),
    #[error("success count {successes} exceeds trial count {trials}")]
    CountOutOfRange { successes: u64, trials: u64 },
    #[error("binomial tails are computed exactly only for n <= {max}, got n = {n}")]
    TooManyTrials { n: u64, max: u64 },
    #[error("index {index} out of range for {len} hypotheses")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

fn fmt_index(index: Option<usize>) -> String {
    index.map(|i| format!("[{i}]")).unwrap_or_default()
}
