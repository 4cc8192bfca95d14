//! Exact dyadic rationals `m / 2^e`.
//!
//! Every distance the fixed-point systems produce is a dyadic rational, so
//! thresholds and radii are stored the same way and all comparisons stay
//! exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::ParseError;

/// The nonnegative dyadic rational `num / 2^exp`, kept normalized (odd
/// numerator, or zero with exponent zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: u128, exp: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let tz = num.trailing_zeros().min(exp);
        Dyadic {
            num: num >> tz,
            exp: exp - tz,
        }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic { num: 1, exp: k }
    }

    /// A fixed-point value `raw / 2^bits`.
    pub fn from_raw(raw: u128, bits: u32) -> Self {
        Dyadic::new(raw, bits)
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn half(&self) -> Self {
        if self.num == 0 {
            *self
        } else {
            Dyadic {
                num: self.num,
                exp: self.exp + 1,
            }
        }
    }

    /// The value scaled by `2^bits`, if it is an integer that fits in `u128`.
    pub fn to_raw(&self, bits: u32) -> Option<u128> {
        if self.exp > bits {
            return None;
        }
        let shift = bits - self.exp;
        if shift >= 128 {
            return if self.num == 0 { Some(0) } else { None };
        }
        if self.num.leading_zeros() < shift {
            return None;
        }
        Some(self.num << shift)
    }

    /// Compares `raw / 2^bits` against `self` without building a second
    /// `Dyadic`.
    pub fn cmp_raw(&self, raw: u128, bits: u32) -> Ordering {
        Dyadic::from_raw(raw, bits).cmp(self)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }

    /// Parses a decimal literal and rounds it to the nearest multiple of
    /// `2^-bits` (ties away from zero). Returns the value and whether the
    /// conversion was exact.
    pub fn from_decimal(text: &str, bits: u32) -> Result<(Dyadic, bool), ParseError> {
        let (int_part, frac_part) = match text.find('.') {
            Some(i) => (&text[..i], &text[i + 1..]),
            None => (text, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseError::new(text, 0, "expected a number"));
        }
        for (i, c) in text.char_indices() {
            if !(c.is_ascii_digit() || c == '.') {
                return Err(ParseError::new(text, i, format!("unexpected character {c:?}")));
            }
        }
        if frac_part.contains('.') {
            let pos = int_part.len() + 1 + frac_part.find('.').unwrap_or(0);
            return Err(ParseError::new(text, pos, "second decimal point"));
        }
        let digits: String = format!("{int_part}{frac_part}");
        let numer = BigUint::parse_bytes(digits.as_bytes(), 10).unwrap_or_else(BigUint::zero);
        let denom = BigUint::from(10u32).pow(frac_part.len() as u32);
        let scaled = numer << bits;
        let exact = (&scaled % &denom).is_zero();
        let rounded = (scaled * 2u32 + &denom) / (denom * 2u32);
        let raw = rounded
            .to_u128()
            .ok_or_else(|| ParseError::new(text, 0, "value too large"))?;
        Ok((Dyadic::new(raw, bits), exact))
    }

    fn parse_uint(text: &str, offset: usize, outer: &str) -> Result<u128, ParseError> {
        if text.is_empty() {
            return Err(ParseError::new(outer, offset, "expected digits"));
        }
        for (i, c) in text.char_indices() {
            if !c.is_ascii_digit() {
                return Err(ParseError::new(outer, offset + i, format!("unexpected character {c:?}")));
            }
        }
        text.parse::<u128>()
            .map_err(|_| ParseError::new(outer, offset, "integer too large"))
    }

    /// Parses `m/2^e`, `p/q` with `q` a power of two, or a decimal literal
    /// rounded at `bits` of precision.
    pub fn parse_with_precision(text: &str, bits: u32) -> Result<(Dyadic, bool), ParseError> {
        let text_trim = text.trim();
        let Some(slash) = text_trim.find('/') else {
            return Dyadic::from_decimal(text_trim, bits);
        };
        let num = Self::parse_uint(&text_trim[..slash], 0, text_trim)?;
        let den_text = &text_trim[slash + 1..];
        let exp = if let Some(e) = den_text.strip_prefix("2^") {
            let e = Self::parse_uint(e, slash + 3, text_trim)?;
            u32::try_from(e).map_err(|_| ParseError::new(text_trim, slash + 3, "exponent too large"))?
        } else {
            let q = Self::parse_uint(den_text, slash + 1, text_trim)?;
            if q == 0 || !q.is_power_of_two() {
                return Err(ParseError::new(
                    text_trim,
                    slash + 1,
                    "denominator must be a power of two",
                ));
            }
            q.trailing_zeros()
        };
        Ok((Dyadic::new(num, exp), true))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        // Bring both to the larger exponent; a shift that would overflow
        // means that side exceeds every u128 and is therefore larger.
        let (a, b, flip) = if self.exp >= other.exp {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let shift = a.exp - b.exp;
        let ord = if b.num == 0 {
            a.num.cmp(&0)
        } else if shift >= 128 || b.num.leading_zeros() < shift {
            Ordering::Less
        } else {
            a.num.cmp(&(b.num << shift))
        };
        if flip {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl FromStr for Dyadic {
    type Err = ParseError;

    /// Exact forms only; decimals must be dyadic (`0.375`) to be accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (value, exact) = Dyadic::parse_with_precision(s, 128)?;
        if !exact {
            return Err(ParseError::new(s, 0, "not an exact dyadic rational"));
        }
        Ok(value)
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<Dyadic> for num_rational::BigRational {
    fn from(d: Dyadic) -> Self {
        let num = num_bigint::BigInt::from(d.num);
        let den = num_bigint::BigInt::one() << d.exp;
        num_rational::BigRational::new(num, den)
    }
}

/// A distance known exactly, or only bounded above because a finite scan
/// found no disagreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricValue {
    Exact(Dyadic),
    AtMost(Dyadic),
}

impl MetricValue {
    pub fn upper(&self) -> Dyadic {
        match *self {
            MetricValue::Exact(d) | MetricValue::AtMost(d) => d,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MetricValue::Exact(_))
    }

    /// Whether the true distance is certainly `> delta`, certainly `<= delta`,
    /// or cannot be decided from the recorded value.
    pub fn compare_threshold(&self, delta: Dyadic) -> Exceedance {
        match *self {
            MetricValue::Exact(d) if d > delta => Exceedance::Exceeds,
            MetricValue::Exact(_) => Exceedance::Within,
            MetricValue::AtMost(b) if b <= delta => Exceedance::Within,
            MetricValue::AtMost(_) => Exceedance::Ambiguous,
        }
    }

    /// `true` when `self` is a better candidate for "smallest distance" than
    /// `other`. Upper bounds rank below every exact value since the true
    /// distance may be arbitrarily small.
    pub fn possibly_smaller_than(&self, other: &MetricValue) -> bool {
        match (self, other) {
            (MetricValue::AtMost(a), MetricValue::AtMost(b)) => a < b,
            (MetricValue::AtMost(_), MetricValue::Exact(_)) => true,
            (MetricValue::Exact(_), MetricValue::AtMost(_)) => false,
            (MetricValue::Exact(a), MetricValue::Exact(b)) => a < b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exceedance {
    Exceeds,
    Within,
    Ambiguous,
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Exact(d) => write!(f, "{d}"),
            MetricValue::AtMost(d) => write!(f, "<={d}"),
        }
    }
}

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
