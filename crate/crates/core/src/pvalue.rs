//! Scalar p-value transforms.
//!
//! The synthetic-powered p-value lets a pooled (real plus synthetic) p-value
//! lower the real-data p-value by at most `delta`:
//!
//! ```text
//! p^delta = p ∧ (p̃ ∨ (p − delta))
//! ```
//!
//! The static form replaces the additive floor `p − delta` by a
//! multiplicative floor `c · p`. With `delta = (ε/α)·t` and `c = α/(α+ε)`
//! both forms agree on every comparison against the threshold `t`, which is
//! what lets the rank-adaptive procedure run as a single BH pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real-data p-value together with the p-value computed on the pooled
/// real-and-synthetic data for the same hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValuePair<T = f64> {
    pub p_real: T,
    pub p_pooled: T,
}

impl<T: Scalar> PValuePair<T> {
    pub fn new(p_real: T, p_pooled: T) -> Result<Self> {
        check_probability(p_real, "p_real", None)?;
        check_probability(p_pooled, "p_pooled", None)?;
        Ok(PValuePair { p_real, p_pooled })
    }

    pub(crate) fn validate(&self, index: usize) -> Result<()> {
        check_probability(self.p_real, "p_real", Some(index))?;
        check_probability(self.p_pooled, "p_pooled", Some(index))
    }
}

pub(crate) fn check_probability<T: Scalar>(
    value: T,
    field: &'static str,
    index: Option<usize>,
) -> Result<()> {
    if value.is_nan() {
        return Err(Error::NotANumber { field, index });
    }
    if !(value >= T::zero() && value <= T::one()) {
        return Err(Error::Probability {
            field,
            index,
            value: value.to_f64(),
        });
    }
    Ok(())
}

/// `p ∧ (p̃ ∨ floor)` without validation.
#[inline]
pub(crate) fn guarded<T: Scalar>(p_real: T, p_pooled: T, floor: T) -> T {
    p_real.min(p_pooled.max(floor))
}

/// Synthetic-powered p-value at level `delta`: `p ∧ (p̃ ∨ (p − delta))`.
///
/// The floor `p − delta` is not clamped at zero.
pub fn synthetic_powered_pvalue<T: Scalar>(p_real: T, p_pooled: T, delta: T) -> Result<T> {
    check_probability(p_real, "p_real", None)?;
    check_probability(p_pooled, "p_pooled", None)?;
    if delta.is_nan() {
        return Err(Error::NotANumber {
            field: "delta",
            index: None,
        });
    }
    if !delta.is_finite() {
        return Err(Error::NotFinite {
            field: "delta",
            index: None,
            value: delta.to_f64(),
        });
    }
    if delta < T::zero() {
        return Err(Error::NegativeDelta(delta.to_f64()));
    }
    Ok(guarded(p_real, p_pooled, p_real - delta))
}

/// Static modified p-value `p ∧ (p̃ ∨ (c · p))` for `c ∈ (0, 1]`.
pub fn static_modified_pvalue<T: Scalar>(p_real: T, p_pooled: T, c: T) -> Result<T> {
    check_probability(p_real, "p_real", None)?;
    check_probability(p_pooled, "p_pooled", None)?;
    if c.is_nan() {
        return Err(Error::NotANumber {
            field: "c",
            index: None,
        });
    }
    if !(c > T::zero() && c <= T::one()) {
        return Err(Error::InvalidRatio(c.to_f64()));
    }
    Ok(guarded(p_real, p_pooled, c * p_real))
}

impl<T: Scalar> PValuePair<T> {
    pub fn synthetic_powered(&self, delta: T) -> Result<T> {
        synthetic_powered_pvalue(self.p_real, self.p_pooled, delta)
    }

    pub fn static_modified(&self, c: T) -> Result<T> {
        static_modified_pvalue(self.p_real, self.p_pooled, c)
    }
}
