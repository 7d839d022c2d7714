//! Exact arithmetic in the extended half-line `[0, oo]`.
//!
//! Values are either a nonnegative rational (arbitrary precision) or the
//! point at infinity. The operations here are the quantale operations:
//! extended addition, truncated subtraction, scaling by a nonnegative
//! rational, and the numeric min/max/order. Everything is exact; there is
//! no floating point anywhere in this crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Exact rational scalar. All scalars in this crate are nonnegative; the
/// type does not enforce that by itself, so constructors of [`ExtValue`]
/// and the formula AST check it.
pub type Rational = BigRational;

/// Build a rational from an integer pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Truncated subtraction on plain rationals: `max(a - b, 0)`.
pub fn rational_tsub(a: &Rational, b: &Rational) -> Rational {
    if a > b {
        a - b
    } else {
        Rational::zero()
    }
}

/// A point of the extended half-line `[0, oo]`.
///
/// `Finite(q)` always holds a canonical (reduced) nonnegative rational;
/// `Infinity` is the single point at infinity. Note that the *lattice*
/// order used by the logics is the reverse of the numeric order exposed
/// here (`0` is the top truth value, `oo` the bottom); comparison helpers
/// on this type are always numeric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtValue {
    Finite(Rational),
    Infinity,
}

impl ExtValue {
    /// Wrap a nonnegative rational. Panics if `q < 0`: negative values are
    /// never meaningful in `[0, oo]` and always indicate a caller bug.
    pub fn finite(q: Rational) -> Self {
        assert!(!q.is_negative(), "ExtValue::finite: negative rational {q}");
        ExtValue::Finite(q)
    }

    pub fn zero() -> Self {
        ExtValue::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtValue::Finite(Rational::one())
    }

    pub fn from_int(n: u64) -> Self {
        ExtValue::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValue::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtValue::Finite(q) if q.is_zero())
    }

    /// Extended addition: `oo` absorbs.
    pub fn add(&self, other: &ExtValue) -> ExtValue {
        match (self, other) {
            (ExtValue::Infinity, _) | (_, ExtValue::Infinity) => ExtValue::Infinity,
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
        }
    }

    /// Truncated subtraction `self -. other`:
    ///
    /// * `r -. s = 0` when `r <= s` (in particular `oo -. oo = 0`),
    /// * `r -. s = r - s` when `r > s` and `r` is finite,
    /// * `oo -. s = oo` when `s` is finite.
    ///
    /// This is the residual of extended addition: `a + b >= c` iff
    /// `b >= c -. a` (numeric order), which is what makes implication work.
    pub fn tsub(&self, other: &ExtValue) -> ExtValue {
        match (self, other) {
            (_, ExtValue::Infinity) => ExtValue::zero(),
            (ExtValue::Infinity, ExtValue::Finite(_)) => ExtValue::Infinity,
            (ExtValue::Finite(a), ExtValue::Finite(b)) => {
                if a <= b {
                    ExtValue::zero()
                } else {
                    ExtValue::Finite(a - b)
                }
            }
        }
    }

    /// Scale by a nonnegative rational. The convention `0 * oo = 0` is
    /// forced by soundness of the zero-scalar axiom. Panics on a negative
    /// scalar.
    pub fn scale(&self, r: &Rational) -> ExtValue {
        assert!(!r.is_negative(), "ExtValue::scale: negative scalar {r}");
        match self {
            ExtValue::Finite(q) => ExtValue::Finite(r * q),
            ExtValue::Infinity => {
                if r.is_zero() {
                    ExtValue::zero()
                } else {
                    ExtValue::Infinity
                }
            }
        }
    }

    /// The finite rational inside, if any.
    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtValue::Finite(q) => Some(q),
            ExtValue::Infinity => None,
        }
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    /// Numeric order with `oo` as the greatest element.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtValue::Infinity, ExtValue::Infinity) => Ordering::Equal,
            (ExtValue::Infinity, ExtValue::Finite(_)) => Ordering::Greater,
            (ExtValue::Finite(_), ExtValue::Infinity) => Ordering::Less,
            (ExtValue::Finite(a), ExtValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(q) => write!(f, "{q}"),
            ExtValue::Infinity => write!(f, "inf"),
        }
    }
}

/// Error for [`parse_rational`] and [`ExtValue::from_str`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid value literal `{input}`: {reason}")]
pub struct ParseValueError {
    pub input: String,
    pub reason: &'static str,
}

fn value_err(input: &str, reason: &'static str) -> ParseValueError {
    ParseValueError { input: input.to_string(), reason }
}

/// Parse a nonnegative rational literal: an integer `p` or a fraction
/// `p/q` with decimal digits and a nonzero denominator.
pub fn parse_rational(s: &str) -> Result<Rational, ParseValueError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    if num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
        return Err(value_err(s, "expected decimal digits"));
    }
    let n: BigInt = num.parse().expect("digit string parses as BigInt");
    let d: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(value_err(s, "expected decimal digits after `/`"));
            }
            d.parse().expect("digit string parses as BigInt")
        }
    };
    if d.is_zero() {
        return Err(value_err(s, "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for ExtValue {
    type Err = ParseValueError;

    /// Parse `inf` or a nonnegative rational literal.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" {
            Ok(ExtValue::Infinity)
        } else {
            parse_rational(t).map(ExtValue::Finite)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(n: i64, d: i64) -> ExtValue {
        ExtValue::finite(rat(n, d))
    }

    fn int(n: i64) -> ExtValue {
        ExtValue::finite(rat_int(n))
    }

    const INF: ExtValue = ExtValue::Infinity;

    #[test]
    fn truncated_subtraction_table() {
        // the three defining cases, including both infinite corners
        assert_eq!(int(5).tsub(&int(3)), int(2));
        assert_eq!(int(3).tsub(&int(5)), int(0));
        assert_eq!(int(3).tsub(&int(3)), int(0));
        assert_eq!(INF.tsub(&int(7)), INF);
        assert_eq!(INF.tsub(&INF), int(0));
        assert_eq!(int(7).tsub(&INF), int(0));
        assert_eq!(fin(7, 2).tsub(&fin(1, 3)), fin(19, 6));
    }

    #[test]
    fn addition_absorbs_infinity() {
        assert_eq!(int(2).add(&int(3)), int(5));
        assert_eq!(INF.add(&int(3)), INF);
        assert_eq!(int(3).add(&INF), INF);
        assert_eq!(INF.add(&INF), INF);
        assert_eq!(fin(1, 2).add(&fin(1, 3)), fin(5, 6));
    }

    #[test]
    fn scaling_conventions() {
        assert_eq!(INF.scale(&rat_int(0)), int(0), "0 * oo = 0");
        assert_eq!(INF.scale(&rat(1, 2)), INF);
        assert_eq!(int(6).scale(&rat(2, 3)), int(4));
        assert_eq!(int(0).scale(&rat_int(0)), int(0));
    }

    #[test]
    fn adjunction_add_tsub() {
        // a + b >= c  iff  b >= c -. a, spot-checked over a small grid
        let pts = [int(0), fin(1, 2), int(1), int(3), INF];
        for a in &pts {
            for b in &pts {
                for c in &pts {
                    let lhs = a.add(b) >= *c;
                    let rhs = *b >= c.tsub(a);
                    assert_eq!(lhs, rhs, "a={a} b={b} c={c}");
                }
            }
        }
    }

    #[test]
    fn order_and_lattice_ops() {
        assert!(int(0) < fin(1, 2));
        assert!(fin(1, 2) < INF);
        assert_eq!(int(3).min(INF), int(3));
        assert_eq!(int(3).max(INF), INF);
        assert!(int(2) <= int(2));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "7", "3/4", "19/6", "inf"] {
            let v: ExtValue = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("6/4".parse::<ExtValue>().unwrap(), fin(3, 2));
        assert!("-1".parse::<ExtValue>().is_err());
        assert!("1/0".parse::<ExtValue>().is_err());
        assert!("1.5".parse::<ExtValue>().is_err());
        assert!("".parse::<ExtValue>().is_err());
    }
}
