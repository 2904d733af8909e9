//! Numeric backends for the step-up procedures.
//!
//! Every procedure is generic over [`Scalar`]. `f64` is the production
//! backend. [`Exact`] evaluates the same formulas in exact rational
//! arithmetic so that two algebraically equivalent formulations (for example
//! `p - delta <= t` against `c * p <= t`) can be compared without rounding at
//! the threshold boundary.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_rational::Ratio;
use num_traits::{Float, ToPrimitive, Zero};

/// Arithmetic needed by the procedures.
pub trait Scalar:
    Copy
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_count(n: usize) -> Self;
    /// Total order used for sorting. Only called on validated values.
    fn total_cmp(&self, other: &Self) -> Ordering;
    fn is_nan(&self) -> bool;
    fn is_finite(&self) -> bool;
    /// Absolute tolerance accepted on the weight normalization `sum w = m`.
    fn weight_sum_tolerance() -> Self;
    fn to_f64(&self) -> f64;

    /// Sorts ascending by [`Scalar::total_cmp`].
    fn sort(values: &mut [Self]) {
        values.sort_unstable_by(Self::total_cmp);
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            Self::zero() - self
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_count(n: usize) -> Self {
        n as f64
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn is_nan(&self) -> bool {
        f64::is_nan(*self)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn weight_sum_tolerance() -> Self {
        1e-9
    }

    fn sort(values: &mut [Self]) {
        // Integer keys with the same order as `f64::total_cmp`.
        let key = |x: f64| {
            let bits = x.to_bits();
            bits ^ ((((bits as i64) >> 63) as u64) | (1 << 63))
        };
        let unkey = |k: u64| {
            let bits = if k >> 63 == 1 { k ^ (1 << 63) } else { !k };
            f64::from_bits(bits)
        };
        let mut keys: Vec<u64> = values.iter().map(|&x| key(x)).collect();
        keys.sort_unstable();
        for (x, k) in values.iter_mut().zip(keys) {
            *x = unkey(k);
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Exact rational number backed by a normalized `i128` fraction.
///
/// Intended for inputs with modest denominators (grids such as `k/1000`).
/// Arithmetic panics on `i128` overflow in debug builds.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exact(Ratio<i128>);

impl Exact {
    /// `numer / denom`. Panics if `denom` is zero.
    pub fn new(numer: i128, denom: i128) -> Self {
        Exact(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i128) -> Self {
        Exact(Ratio::from_integer(n))
    }

    /// The exact dyadic value of `x`, if it fits in an `i128` fraction.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Exact::zero());
        }
        let (mantissa, exponent, sign) = Float::integer_decode(x);
        let numer = i128::from(sign) * i128::from(mantissa);
        if exponent >= 0 {
            let shift = u32::try_from(exponent).ok()?;
            let scaled = numer.checked_mul(1i128.checked_shl(shift).filter(|v| *v > 0)?)?;
            Some(Exact::from_integer(scaled))
        } else {
            let shift = u32::try_from(-i32::from(exponent)).ok()?;
            if shift > 126 {
                return None;
            }
            Some(Exact(Ratio::new(numer, 1i128 << shift)))
        }
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        // Denominators are positive, so cross products order the values.
        let (a, b) = (self.0.numer(), self.0.denom());
        let (c, d) = (other.0.numer(), other.0.denom());
        match (a.checked_mul(*d), c.checked_mul(*b)) {
            (Some(lhs), Some(rhs)) => lhs.cmp(&rhs),
            _ => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! exact_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Exact {
            type Output = Exact;
            fn $method(self, rhs: Exact) -> Exact {
                Exact($trait::$method(self.0, rhs.0))
            }
        }
    };
}

exact_binop!(Add, add);
exact_binop!(Sub, sub);
exact_binop!(Mul, mul);
exact_binop!(Div, div);

impl Scalar for Exact {
    fn zero() -> Self {
        Exact(Ratio::zero())
    }

    fn one() -> Self {
        Exact::from_integer(1)
    }

    fn from_count(n: usize) -> Self {
        Exact::from_integer(n as i128)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn is_nan(&self) -> bool {
        false
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn weight_sum_tolerance() -> Self {
        Self::zero()
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_from_f64_is_dyadic() {
        assert_eq!(Exact::from_f64(0.5), Some(Exact::new(1, 2)));
        assert_eq!(Exact::from_f64(3.0), Some(Exact::from_integer(3)));
        assert_eq!(Exact::from_f64(-0.25), Some(Exact::new(-1, 4)));
        assert_eq!(Exact::from_f64(0.0), Some(Exact::zero()));
        assert_eq!(Exact::from_f64(f64::NAN), None);
        // 0.1 is not 1/10 in binary.
        assert_ne!(Exact::from_f64(0.1), Some(Exact::new(1, 10)));
        assert_eq!(Exact::from_f64(1e-300), None);
    }

    #[test]
    fn exact_arithmetic() {
        let a = Exact::new(3, 10);
        let b = Exact::new(1, 10);
        assert_eq!(a - b, Exact::new(1, 5));
        assert_eq!(a * b, Exact::new(3, 100));
        assert_eq!(a / b, Exact::from_integer(3));
        assert_eq!(Scalar::min(a, b), b);
        assert_eq!(Scalar::max(a, b), a);
        assert_eq!((b - a).abs(), Exact::new(1, 5));
        assert!((a.to_f64() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn f64_sort_matches_total_order() {
        let mut xs = vec![0.5, -0.0, 0.0, 1e-300, 1.0, -2.0, 0.25, f64::INFINITY, 0.5];
        let mut expected = xs.clone();
        expected.sort_by(f64::total_cmp);
        <f64 as Scalar>::sort(&mut xs);
        assert_eq!(
            xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            expected.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn exact_ordering() {
        assert!(Exact::new(1, 3) < Exact::new(1, 2));
        assert!(Exact::new(-1, 2) < Exact::new(-1, 3));
        assert_eq!(Exact::new(2, 4).cmp(&Exact::new(1, 2)), Ordering::Equal);
        let big = Exact::new(i128::MAX - 1, i128::MAX);
        let bigger = Exact::new(i128::MAX - 2, i128::MAX - 1);
        assert!(bigger < big);
        assert!(Exact::new(i128::MAX, 3) > Exact::new(i128::MAX, 5));
    }
}
