//! Scalar abstraction and the extended nonnegative half-line `[0, ∞]`.
//!
//! Everything numeric in the crate is generic over [`Scalar`]. The law
//! checks rely on exact equality, so the canonical instantiation is
//! [`BigRational`](num_rational::BigRational); the float impls exist for
//! quick exploratory use and are not used by any suite.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed};

/// A totally ordered field-like scalar usable as a finite value of
/// [`ExtNonneg`].
pub trait Scalar: Num + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }

    /// Rough size of the representation, used by the shrinker to prefer
    /// simpler values. Floats report zero.
    fn complexity(&self) -> u64 {
        0
    }

    /// Candidates with a simpler representation, tried in order by the shrinker.
    fn simplifications(&self) -> Vec<Self> {
        Vec::new()
    }
}

impl Scalar for BigRational {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn complexity(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    fn simplifications(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if !self.is_integer() {
            out.push(self.floor());
            out.push(self.ceil());
            let two = BigInt::from(2);
            if self.denom() > &two {
                let halved = BigRational::new(self.numer() / &two, self.denom() / &two);
                if !halved.is_negative() {
                    out.push(halved);
                }
            }
        } else if self > &BigRational::one() {
            out.push(BigRational::one());
        }
        out.retain(|c| c != self && !c.is_negative());
        out
    }
}

impl Scalar for Ratio<i64> {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn complexity(&self) -> u64 {
        (64 - self.numer().unsigned_abs().leading_zeros() as u64)
            + (64 - self.denom().unsigned_abs().leading_zeros() as u64)
    }
}

impl Scalar for f64 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
}

impl Scalar for f32 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f32 / denom as f32
    }
}

/// A value in `[0, ∞]`.
///
/// Arithmetic is total: `∞ + x = ∞`, `∞ · x = ∞` for `x > 0` and `∞ · 0 = 0`.
/// Construction through [`ExtNonneg::finite`] rejects negative values; the
/// enum variants are public so pattern matching stays convenient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtNonneg<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> ExtNonneg<S> {
    pub fn finite(value: S) -> Option<Self> {
        if value.is_negative_value() {
            None
        } else {
            Some(ExtNonneg::Finite(value))
        }
    }

    pub fn zero() -> Self {
        ExtNonneg::Finite(S::zero())
    }

    pub fn one() -> Self {
        ExtNonneg::Finite(S::one())
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(numer >= 0 && denom > 0, "ExtNonneg::ratio needs a nonnegative ratio");
        ExtNonneg::Finite(S::from_ratio(numer, denom))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtNonneg::Finite(v) if v.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtNonneg::Infinite)
    }

    pub fn as_finite(&self) -> Option<&S> {
        match self {
            ExtNonneg::Finite(v) => Some(v),
            ExtNonneg::Infinite => None,
        }
    }

    /// The sign map `[0, ∞] → {0, 1}`; `∞` maps to `1`.
    pub fn sgn(&self) -> bool {
        if crate::mutants::active(crate::mutants::Mutation::NonStrictSign) {
            return true;
        }
        !self.is_zero()
    }

    /// Difference `self − other` when `other ≤ self` and the result is
    /// determined (`∞ − ∞` is not).
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => ExtNonneg::finite(a.clone() - b.clone()),
            (ExtNonneg::Infinite, ExtNonneg::Finite(_)) => Some(ExtNonneg::Infinite),
            _ => None,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl<S: Scalar> PartialOrd for ExtNonneg<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => a.partial_cmp(b),
            (ExtNonneg::Finite(_), ExtNonneg::Infinite) => Some(Ordering::Less),
            (ExtNonneg::Infinite, ExtNonneg::Finite(_)) => Some(Ordering::Greater),
            (ExtNonneg::Infinite, ExtNonneg::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl<S: Scalar + Ord> Ord for ExtNonneg<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("ordered scalar")
    }
}

impl<S: Scalar> Add for ExtNonneg<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => ExtNonneg::Finite(a + b),
            _ => ExtNonneg::Infinite,
        }
    }
}

impl<'a, S: Scalar> Add<&'a ExtNonneg<S>> for &'a ExtNonneg<S> {
    type Output = ExtNonneg<S>;

    fn add(self, rhs: Self) -> ExtNonneg<S> {
        self.clone() + rhs.clone()
    }
}

impl<S: Scalar> Mul for ExtNonneg<S> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return ExtNonneg::zero();
        }
        match (self, rhs) {
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => ExtNonneg::Finite(a * b),
            _ => ExtNonneg::Infinite,
        }
    }
}

impl<'a, S: Scalar> Mul<&'a ExtNonneg<S>> for &'a ExtNonneg<S> {
    type Output = ExtNonneg<S>;

    fn mul(self, rhs: Self) -> ExtNonneg<S> {
        self.clone() * rhs.clone()
    }
}

impl<S: Scalar> Sum for ExtNonneg<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExtNonneg::zero(), |acc, x| acc + x)
    }
}

impl<S: Scalar> Default for ExtNonneg<S> {
    fn default() -> Self {
        ExtNonneg::zero()
    }
}

impl<S: Scalar> Display for ExtNonneg<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNonneg::Finite(v) => Display::fmt(v, f),
            ExtNonneg::Infinite => f.write_str("inf"),
        }
    }
}

impl<S: Scalar> Debug for ExtNonneg<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

impl<S: Scalar> From<S> for ExtNonneg<S> {
    /// Panics on negative input.
    fn from(value: S) -> Self {
        ExtNonneg::finite(value).expect("negative value in [0, ∞]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a value in [0, inf]: {0:?}")]
pub struct ParseExtError(pub String);

impl<S: Scalar + FromStr> FromStr for ExtNonneg<S> {
    type Err = ParseExtError;

    /// Grammar: `p/q`, `p` or `inf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" {
            return Ok(ExtNonneg::Infinite);
        }
        if t.is_empty() || t.starts_with('+') {
            return Err(ParseExtError(s.to_owned()));
        }
        let v = S::from_str(t).map_err(|_| ParseExtError(s.to_owned()))?;
        ExtNonneg::finite(v).ok_or_else(|| ParseExtError(s.to_owned()))
    }
}

/// Serialized as the string form accepted by [`FromStr`], never as a float.
impl<S: Scalar> serde::Serialize for ExtNonneg<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

impl<'de, S: Scalar + FromStr> serde::Deserialize<'de> for ExtNonneg<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Scratch domain for inclusion–exclusion sums: finite signed values plus
/// both infinities.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SignedAccumulator<S> {
    finite: S,
    plus_infinite: bool,
    minus_infinite: bool,
}

impl<S: Scalar> SignedAccumulator<S> {
    pub(crate) fn new() -> Self {
        SignedAccumulator { finite: S::zero(), plus_infinite: false, minus_infinite: false }
    }

    pub(crate) fn add(&mut self, value: &ExtNonneg<S>, positive: bool) {
        match (value, positive) {
            (ExtNonneg::Finite(v), true) => self.finite = self.finite.clone() + v.clone(),
            (ExtNonneg::Finite(v), false) => self.finite = self.finite.clone() - v.clone(),
            (ExtNonneg::Infinite, true) => self.plus_infinite = true,
            (ExtNonneg::Infinite, false) => self.minus_infinite = true,
        }
    }

    /// `None` when both infinities occurred or the finite total is negative.
    pub(crate) fn resolve(&self) -> Option<ExtNonneg<S>> {
        match (self.plus_infinite, self.minus_infinite) {
            (true, true) | (false, true) => None,
            (true, false) => Some(ExtNonneg::Infinite),
            (false, false) => ExtNonneg::finite(self.finite.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ExtNonneg<BigRational>;

    #[test]
    fn infinity_conventions() {
        assert_eq!(Q::Infinite + Q::ratio(3, 2), Q::Infinite);
        assert_eq!(Q::Infinite * Q::ratio(1, 7), Q::Infinite);
        assert_eq!(Q::Infinite * Q::zero(), Q::zero());
        assert_eq!(Q::zero() * Q::Infinite, Q::zero());
        assert!(Q::Infinite > Q::ratio(1_000_000, 1));
    }

    #[test]
    fn parse_grammar() {
        assert_eq!("3/6".parse::<Q>().unwrap(), Q::ratio(1, 2));
        assert_eq!("4".parse::<Q>().unwrap(), Q::ratio(4, 1));
        assert_eq!("inf".parse::<Q>().unwrap(), Q::Infinite);
        assert!("-1/2".parse::<Q>().is_err());
        assert!("0.5".parse::<Q>().is_err());
        assert!("".parse::<Q>().is_err());
        assert_eq!(Q::ratio(2, 3).to_string(), "2/3");
        assert_eq!(Q::Infinite.to_string(), "inf");
    }

    #[test]
    fn sign_is_strict() {
        assert!(!Q::zero().sgn());
        assert!(Q::ratio(1, 16).sgn());
        assert!(Q::Infinite.sgn());
    }

    #[test]
    fn signed_accumulator_detects_indeterminate() {
        let mut acc = SignedAccumulator::<BigRational>::new();
        acc.add(&Q::Infinite, true);
        acc.add(&Q::Infinite, false);
        assert_eq!(acc.resolve(), None);
        let mut acc = SignedAccumulator::<BigRational>::new();
        acc.add(&Q::ratio(1, 2), true);
        acc.add(&Q::ratio(1, 3), false);
        assert_eq!(acc.resolve(), Some(Q::ratio(1, 6)));
    }

    #[test]
    fn float_instantiation_compiles_and_agrees_roughly() {
        let a = ExtNonneg::<f64>::ratio(1, 4) + ExtNonneg::<f64>::ratio(1, 4);
        assert_eq!(a, ExtNonneg::Finite(0.5));
    }
}
