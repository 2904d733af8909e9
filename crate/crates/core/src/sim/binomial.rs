//! Exact tails of `Binomial(n, 1/2)` and the randomized one-sided test of
//! `q ≤ 1/2` against `q > 1/2`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `n` for which tails are tabulated.
pub const MAX_EXACT_TRIALS: u64 = 2000;

/// `P(B = x)` and `P(B > x)` for `B ~ Binomial(n, 1/2)`, computed from exact
/// binomial coefficients and rounded once to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct FairCoinTails {
    n: u64,
    pmf: Vec<f64>,
    upper: Vec<f64>,
}

impl FairCoinTails {
    pub fn new(n: u64) -> Result<Self> {
        if n > MAX_EXACT_TRIALS {
            return Err(Error::TooManyTrials {
                n,
                max: MAX_EXACT_TRIALS,
            });
        }
        let len = n as usize + 1;
        let mut coeffs = Vec::with_capacity(len);
        let mut c = BigUint::one();
        for k in 0..=n {
            coeffs.push(c.clone());
            c = c * BigUint::from(n - k) / BigUint::from(k + 1);
        }
        let total = BigInt::from(BigUint::one() << n);
        let to_f64 = |numer: &BigUint| {
            BigRational::new(BigInt::from(numer.clone()), total.clone())
                .to_f64()
                .unwrap_or(0.0)
        };
        let pmf = coeffs.iter().map(to_f64).collect();
        let mut upper = vec![0.0; len];
        let mut tail = BigUint::zero();
        for x in (0..len).rev() {
            upper[x] = to_f64(&tail);
            tail += &coeffs[x];
        }
        Ok(FairCoinTails { n, pmf, upper })
    }

    pub fn trials(&self) -> u64 {
        self.n
    }

    pub fn pmf(&self, x: u64) -> Result<f64> {
        self.check(x)?;
        Ok(self.pmf[x as usize])
    }

    /// `P(B > x)`.
    pub fn upper_tail(&self, x: u64) -> Result<f64> {
        self.check(x)?;
        Ok(self.upper[x as usize])
    }

    /// `P(B > x) + u·P(B = x)`.
    pub fn randomized_pvalue(&self, x: u64, u: f64) -> Result<f64> {
        self.check(x)?;
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Probability {
                field: "u",
                index: None,
                value: u,
            });
        }
        let i = x as usize;
        Ok((self.upper[i] + u * self.pmf[i]).min(1.0))
    }

    fn check(&self, x: u64) -> Result<()> {
        if x > self.n {
            return Err(Error::CountOutOfRange {
                successes: x,
                trials: self.n,
            });
        }
        Ok(())
    }
}

/// Randomized binomial p-value for `successes` out of `n` fair-coin trials.
pub fn randomized_binomial_pvalue(successes: u64, n: u64, u: f64) -> Result<f64> {
    if successes > n {
        return Err(Error::CountOutOfRange {
            successes,
            trials: n,
        });
    }
    FairCoinTails::new(n)?.randomized_pvalue(successes, u)
}
