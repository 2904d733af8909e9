use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of one method on one simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    /// `|R ∩ nulls| / max(|R|, 1)`.
    pub fdp: f64,
    /// `|R ∩ non-nulls| / max(#non-nulls, 1)`.
    pub power: f64,
    pub rejections: usize,
}

/// FDP and power of `rejected` against the truth in `null_mask`
/// (`true` marks a true null).
pub fn fdp_and_power(rejected: &[usize], null_mask: &[bool]) -> Result<TrialMetrics> {
    let len = null_mask.len();
    let mut false_discoveries = 0usize;
    for &index in rejected {
        match null_mask.get(index) {
            Some(true) => false_discoveries += 1,
            Some(false) => {}
            None => return Err(Error::IndexOutOfRange { index, len }),
        }
    }
    let true_discoveries = rejected.len() - false_discoveries;
    let non_nulls = null_mask.iter().filter(|&&null| !null).count();
    Ok(TrialMetrics {
        fdp: false_discoveries as f64 / rejected.len().max(1) as f64,
        power: true_discoveries as f64 / non_nulls.max(1) as f64,
        rejections: rejected.len(),
    })
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

/// Sample mean and its standard error (`sd / sqrt(T)`, zero for one value).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let squares: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&squares) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rejection_set() {
        let m = fdp_and_power(&[], &[true, false, true]).unwrap();
        assert_eq!(m.fdp, 0.0);
        assert_eq!(m.power, 0.0);
        assert_eq!(m.rejections, 0);
    }

    #[test]
    fn perfect_rejection_set() {
        let m = fdp_and_power(&[1, 3], &[true, false, true, false]).unwrap();
        assert_eq!(m.fdp, 0.0);
        assert_eq!(m.power, 1.0);
    }

    #[test]
    fn reject_everything() {
        let mask = [true, true, true, false];
        let m = fdp_and_power(&[0, 1, 2, 3], &mask).unwrap();
        assert_eq!(m.fdp, 0.75);
        assert_eq!(m.power, 1.0);
        assert_eq!(m.rejections, 4);
    }

    #[test]
    fn all_null_power_is_zero() {
        let m = fdp_and_power(&[0], &[true, true]).unwrap();
        assert_eq!(m.fdp, 1.0);
        assert_eq!(m.power, 0.0);
    }

    #[test]
    fn out_of_range_index() {
        assert_eq!(
            fdp_and_power(&[5], &[true]),
            Err(Error::IndexOutOfRange { index: 5, len: 1 })
        );
    }

    #[test]
    fn summary_statistics() {
        let (mean, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_se(&[0.3]), (0.3, 0.0));
        let many: Vec<f64> = (0..1001).map(|i| i as f64 * 0.001).collect();
        assert!((pairwise_sum(&many) - 500.5).abs() < 1e-9);
    }
}
