//! Extended reals and probabilities that remember an exact rational value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A point of the extended real line.
///
/// Quantiles at the levels 0 and 1 follow the `inf ∅ = +∞` / `sup ∅ = −∞`
/// conventions, so infinities are values in their own right rather than
/// float sentinels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `±f64::INFINITY` onto the infinite variants. NaN is rejected.
    pub fn new(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not an extended real");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Sum on the extended line; `+∞ + −∞` has no value.
    pub fn checked_add(self, other: ExtReal) -> Option<ExtReal> {
        use ExtReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(ExtReal::new(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
        }
    }

    pub fn checked_sub(self, other: ExtReal) -> Option<ExtReal> {
        self.checked_add(-other)
    }

    /// Multiplication by a finite scalar with `0 · ±∞ = 0`.
    pub fn scale(self, k: f64) -> ExtReal {
        match self {
            ExtReal::Finite(x) => ExtReal::new(k * x),
            _ if k == 0.0 => ExtReal::ZERO,
            ExtReal::PosInf => {
                if k > 0.0 {
                    ExtReal::PosInf
                } else {
                    ExtReal::NegInf
                }
            }
            ExtReal::NegInf => {
                if k > 0.0 {
                    ExtReal::NegInf
                } else {
                    ExtReal::PosInf
                }
            }
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::new(x)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::PosInf => s.serialize_str("inf"),
            ExtReal::NegInf => s.serialize_str("-inf"),
        }
    }
}

/// Exact rational value of a finite double.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// A probability carried as a double and, when it was accumulated from
/// exactly known masses, as an exact rational.
///
/// Validity boundaries of the transform rules are strict or non-strict
/// inequalities against such probabilities; comparing rationals keeps
/// `p == π` decidable when `π` is a sum of atom masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Prob {
    approx: f64,
    exact: Option<BigRational>,
}

impl Prob {
    pub fn exact(r: BigRational) -> Self {
        Prob {
            approx: rational_to_f64(&r),
            exact: Some(r),
        }
    }

    pub fn approx(x: f64) -> Self {
        Prob {
            approx: x,
            exact: None,
        }
    }

    pub fn zero() -> Self {
        Prob::exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob::exact(BigRational::one())
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `1 − self`, exact when `self` is.
    pub fn complement(&self) -> Prob {
        match &self.exact {
            Some(r) => Prob::exact(BigRational::one() - r),
            None => Prob::approx(1.0 - self.approx),
        }
    }

    /// Orders a level `p` against this probability.
    pub fn cmp_level(&self, p: f64) -> Ordering {
        match &self.exact {
            Some(r) => rational(p).cmp(r),
            None => p.partial_cmp(&self.approx).unwrap_or(Ordering::Equal),
        }
    }

    pub fn add(&self, other: &Prob) -> Prob {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Prob::exact(a + b),
            _ => Prob::approx(self.approx + other.approx),
        }
    }

    pub fn sub(&self, other: &Prob) -> Prob {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Prob::exact(a - b),
            _ => Prob::approx(self.approx - other.approx),
        }
    }
}

impl From<BigRational> for Prob {
    fn from(r: BigRational) -> Self {
        Prob::exact(r)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.approx)
    }
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Next representable double above `x`.
pub(crate) fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_negation() {
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert_eq!(-ExtReal::PosInf, ExtReal::NegInf);
        assert_eq!(ExtReal::new(f64::INFINITY), ExtReal::PosInf);
    }

    #[test]
    fn undefined_sum() {
        assert_eq!(ExtReal::PosInf.checked_add(ExtReal::NegInf), None);
        assert_eq!(
            ExtReal::PosInf.checked_sub(ExtReal::Finite(3.0)),
            Some(ExtReal::PosInf)
        );
        assert_eq!(ExtReal::PosInf.scale(0.0), ExtReal::ZERO);
        assert_eq!(ExtReal::PosInf.scale(-2.0), ExtReal::NegInf);
    }

    #[test]
    fn exact_level_comparison() {
        // 0.1 + 0.2 is not 0.3 in floats but the rational sum of the two
        // doubles is compared exactly
        let p = Prob::exact(rational(0.1) + rational(0.2));
        assert_eq!(p.cmp_level(0.1 + 0.2), Ordering::Greater);
        assert_eq!(Prob::exact(ratio(3, 4)).cmp_level(0.75), Ordering::Equal);
        assert_eq!(Prob::exact(ratio(1, 3)).complement().value(), 2.0 / 3.0);
    }

    #[test]
    fn next_up_moves_up() {
        assert!(next_up(1.0) > 1.0);
        assert!(next_up(-1.0) > -1.0);
    }
}
