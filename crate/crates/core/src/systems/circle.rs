//! W-bit fixed-point circle coordinates. A coordinate `raw` stands for
//! `raw / 2^W ∈ [0, 1)`; addition and integer multiplication wrap modulo
//! `2^W`, which is exact arithmetic modulo 1.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Precision {
    #[serde(rename = "32")]
    W32,
    #[default]
    #[serde(rename = "64")]
    W64,
    #[serde(rename = "128")]
    W128,
}

impl Precision {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            32 => Ok(Precision::W32),
            64 => Ok(Precision::W64),
            128 => Ok(Precision::W128),
            other => Err(Error::usage(format!("precision must be 32, 64 or 128 bits, got {other}"))),
        }
    }

    pub const fn bits(self) -> u32 {
        match self {
            Precision::W32 => 32,
            Precision::W64 => 64,
            Precision::W128 => 128,
        }
    }

    #[inline]
    pub const fn mask(self) -> u128 {
        match self {
            Precision::W32 => u32::MAX as u128,
            Precision::W64 => u64::MAX as u128,
            Precision::W128 => u128::MAX,
        }
    }

    /// `2^(W-1)`, the raw value of one half.
    #[inline]
    pub const fn half(self) -> u128 {
        1u128 << (self.bits() - 1)
    }

    /// Circle distance between two raw values as a raw value in `[0, 2^(W-1)]`.
    #[inline]
    pub fn raw_distance(self, a: u128, b: u128) -> u128 {
        let d = a.wrapping_sub(b) & self.mask();
        let back = d.wrapping_neg() & self.mask();
        d.min(back)
    }

    /// Raw value of a radius or threshold, if it is a multiple of `2^-W`.
    pub fn raw_of(self, d: Dyadic) -> Result<u128> {
        if d > Dyadic::ONE {
            return Ok(u128::MAX);
        }
        if d == Dyadic::ONE && self == Precision::W128 {
            return Ok(u128::MAX);
        }
        d.to_raw(self.bits()).ok_or_else(|| {
            Error::usage(format!("{d} is finer than the {}-bit coordinate grid", self.bits()))
        })
    }
}

/// A point of the circle `ℝ/ℤ` at a fixed precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CircleCoord {
    raw: u128,
    prec: Precision,
}

impl CircleCoord {
    pub fn from_raw(raw: u128, prec: Precision) -> Self {
        CircleCoord {
            raw: raw & prec.mask(),
            prec,
        }
    }

    pub fn zero(prec: Precision) -> Self {
        CircleCoord { raw: 0, prec }
    }

    /// The fraction `num / 2^exp` reduced modulo 1, truncated to the grid.
    pub fn from_dyadic(d: Dyadic, prec: Precision) -> Self {
        let bits = prec.bits();
        let raw = if d.exponent() <= bits {
            d.numerator().wrapping_shl(bits - d.exponent())
        } else {
            let shift = d.exponent() - bits;
            if shift >= 128 {
                0
            } else {
                d.numerator() >> shift
            }
        };
        CircleCoord::from_raw(raw, prec)
    }

    /// `floor((√2 − 1) · 2^W)`.
    pub fn sqrt2_minus_1(prec: Precision) -> Self {
        let bits = prec.bits();
        let scaled = (BigUint::from(2u32) << (2 * bits)).sqrt();
        let frac = scaled - (BigUint::from(1u32) << bits);
        CircleCoord::from_raw(frac.to_u128().expect("fraction below 1"), prec)
    }

    /// `floor((√5 − 1)/2 · 2^W)`, the fractional golden ratio.
    pub fn golden(prec: Precision) -> Self {
        let bits = prec.bits();
        let root5 = (BigUint::from(5u32) << (2 * bits)).sqrt();
        let frac: BigUint = (root5 - (BigUint::from(1u32) << bits)) >> 1u32;
        CircleCoord::from_raw(frac.to_u128().expect("fraction below 1"), prec)
    }

    pub fn raw(&self) -> u128 {
        self.raw
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn to_dyadic(&self) -> Dyadic {
        Dyadic::from_raw(self.raw, self.prec.bits())
    }

    pub fn to_f64(&self) -> f64 {
        self.to_dyadic().to_f64()
    }

    /// Distance to 0 on the circle.
    pub fn magnitude(&self) -> Dyadic {
        Dyadic::from_raw(self.prec.raw_distance(self.raw, 0), self.prec.bits())
    }

    pub fn wrapping_add(self, other: CircleCoord) -> CircleCoord {
        debug_assert_eq!(self.prec, other.prec);
        CircleCoord::from_raw(self.raw.wrapping_add(other.raw), self.prec)
    }

    pub fn wrapping_sub(self, other: CircleCoord) -> CircleCoord {
        debug_assert_eq!(self.prec, other.prec);
        CircleCoord::from_raw(self.raw.wrapping_sub(other.raw), self.prec)
    }

    /// `n · self` modulo 1, for any signed `n`.
    pub fn wrapping_mul(self, n: i64) -> CircleCoord {
        CircleCoord::from_raw(self.raw.wrapping_mul(n as i128 as u128), self.prec)
    }

    /// Parses `0x…` hexadecimal raw values, decimal fractions (rounded to the
    /// nearest grid point), or the constants `sqrt2-1` and `golden`.
    pub fn parse(text: &str, prec: Precision) -> Result<CircleCoord, ParseError> {
        let t = text.trim();
        match t {
            "sqrt2-1" => return Ok(CircleCoord::sqrt2_minus_1(prec)),
            "golden" => return Ok(CircleCoord::golden(prec)),
            _ => {}
        }
        if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            if let Some(i) = hex.find(|c: char| !c.is_ascii_hexdigit()) {
                return Err(ParseError::new(t, 2 + i, "invalid hexadecimal digit"));
            }
            let raw = u128::from_str_radix(hex, 16)
                .map_err(|_| ParseError::new(t, 2, "hexadecimal value too long"))?;
            if raw > prec.mask() {
                return Err(ParseError::new(
                    t,
                    2,
                    format!("value does not fit in {} bits", prec.bits()),
                ));
            }
            return Ok(CircleCoord::from_raw(raw, prec));
        }
        let (d, _) = Dyadic::from_decimal(t, prec.bits())?;
        if d >= Dyadic::ONE {
            return Err(ParseError::new(t, 0, "circle coordinate must lie in [0, 1)"));
        }
        Ok(CircleCoord::from_dyadic(d, prec))
    }
}

impl fmt::Display for CircleCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = (self.prec.bits() / 4) as usize;
        write!(f, "0x{:0width$x}", self.raw)
    }
}

impl Serialize for CircleCoord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `x + n·alpha` modulo 1.
pub fn rotation_iterate(x: CircleCoord, alpha: CircleCoord, n: i64) -> CircleCoord {
    x.wrapping_add(alpha.wrapping_mul(n))
}

/// `min(|a − b|, 1 − |a − b|)`, exact.
pub fn circle_metric(a: CircleCoord, b: CircleCoord) -> Result<Dyadic> {
    if a.prec != b.prec {
        return Err(Error::usage("circle coordinates have different precisions"));
    }
    Ok(Dyadic::from_raw(a.prec.raw_distance(a.raw, b.raw), a.prec.bits()))
}
