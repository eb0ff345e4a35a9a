use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Num, One, ToPrimitive, Zero};

/// Entry type of a kernel: a commutative semiring with a compatible order.
pub trait Weight:
    Clone + PartialEq + PartialOrd + Zero + One + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Weight for T where
    T: Clone + PartialEq + PartialOrd + Zero + One + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// The boolean semiring: `+` is disjunction and `*` is conjunction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Boolean(pub bool);

impl Add for Boolean {
    type Output = Boolean;
    fn add(self, o: Boolean) -> Boolean {
        Boolean(self.0 || o.0)
    }
}

impl Mul for Boolean {
    type Output = Boolean;
    fn mul(self, o: Boolean) -> Boolean {
        Boolean(self.0 && o.0)
    }
}

impl Zero for Boolean {
    fn zero() -> Self {
        Boolean(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl One for Boolean {
    fn one() -> Self {
        Boolean(true)
    }
}

impl fmt::Debug for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

/// Exact scalars for the probabilistic backend.
pub trait Field: Weight + Num {
    fn from_ratio(r: &BigRational) -> Self;
    fn to_ratio(&self) -> BigRational;
}

impl Field for BigRational {
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_ratio(&self) -> BigRational {
        self.clone()
    }
}

/// Fixed-width rationals; arithmetic panics on overflow, so this is only
/// suitable for small instances.
impl Field for Rational64 {
    fn from_ratio(r: &BigRational) -> Self {
        let n = r.numer().to_i64().expect("numerator fits in i64");
        let d = r.denom().to_i64().expect("denominator fits in i64");
        Rational64::new(n, d)
    }
    fn to_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

/// Parses `"p/q"` or `"p"`; decimal notation is rejected.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let ok = |t: &str| !t.is_empty() && t.chars().enumerate().all(|(i, c)| c.is_ascii_digit() || (i == 0 && c == '-'));
    match s.split_once('/') {
        Some((n, d)) if ok(n) && ok(d) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        None if ok(s) => Some(BigRational::from_integer(s.parse().ok()?)),
        _ => None,
    }
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_semiring() {
        let (t, f) = (Boolean(true), Boolean(false));
        assert_eq!(t + f, t);
        assert_eq!(t * f, f);
        assert!(f < t);
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("1/2"), Some(ratio(1, 2)));
        assert_eq!(parse_ratio("3"), Some(ratio(3, 1)));
        assert_eq!(parse_ratio("0.5"), None);
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("a/b"), None);
    }

    #[test]
    fn small_rationals_round_trip() {
        let r = ratio(3, 7);
        assert_eq!(Rational64::from_ratio(&r).to_ratio(), r);
    }
}
