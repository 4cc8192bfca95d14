//! Torus points and the skew product
//! `T(θ₁, …, θ_d) = (θ₁ + α, θ₂ + θ₁, …, θ_d + θ_{d−1})`.
//!
//! Iterates have the closed form: coordinate `j` of `Tⁿθ` is
//! `Σ_{i=0}^{j} C(n, j−i)·θ_i` with `θ₀ = α`. Binomials are reduced modulo
//! `2^W` by additive Pascal updates (division has no inverse modulo `2^W`),
//! so the closed form is exact on the fixed-point grid and bit-identical to
//! stepping.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::circle::{CircleCoord, Precision};
use crate::dyadic::Dyadic;
use crate::error::{Error, ParseError, Result};

/// Default bound on the binomial degree, and so on the skew dimension.
pub const DEFAULT_MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    prec: Precision,
    coords: Vec<u128>,
}

impl TorusPoint {
    pub fn new(coords: Vec<CircleCoord>) -> Result<Self> {
        let prec = coords
            .first()
            .ok_or_else(|| Error::usage("torus point needs at least one coordinate"))?
            .precision();
        if coords.iter().any(|c| c.precision() != prec) {
            return Err(Error::usage("torus coordinates have different precisions"));
        }
        Ok(TorusPoint {
            prec,
            coords: coords.iter().map(|c| c.raw()).collect(),
        })
    }

    pub fn from_raw(raw: Vec<u128>, prec: Precision) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::usage("torus point needs at least one coordinate"));
        }
        Ok(TorusPoint {
            prec,
            coords: raw.into_iter().map(|r| r & prec.mask()).collect(),
        })
    }

    pub fn zero(dim: usize, prec: Precision) -> Self {
        TorusPoint {
            prec,
            coords: vec![0; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn coord(&self, i: usize) -> CircleCoord {
        CircleCoord::from_raw(self.coords[i], self.prec)
    }

    pub fn raw(&self) -> &[u128] {
        &self.coords
    }

    /// Sup over coordinates of the distance to 0.
    pub fn norm(&self) -> Dyadic {
        let m = self
            .coords
            .iter()
            .map(|&c| self.prec.raw_distance(c, 0))
            .max()
            .unwrap_or(0);
        Dyadic::from_raw(m, self.prec.bits())
    }

    /// Coordinate-wise `self − other` modulo 1.
    pub fn sub(&self, other: &TorusPoint) -> Result<TorusPoint> {
        check_compatible(self, other)?;
        Ok(TorusPoint {
            prec: self.prec,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.wrapping_sub(*b) & self.prec.mask())
                .collect(),
        })
    }

    /// Parses slash-separated coordinates, each in any form
    /// [`CircleCoord::parse`] accepts.
    pub fn parse(text: &str, prec: Precision) -> Result<TorusPoint, ParseError> {
        let mut coords = Vec::new();
        let mut pos = 0;
        for piece in text.split('/') {
            let c = CircleCoord::parse(piece, prec).map_err(|e| e.offset_within(text, pos))?;
            coords.push(c.raw());
            pos += piece.len() + 1;
        }
        Ok(TorusPoint { prec, coords })
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, "/")?;
            }
            write!(f, "{}", self.coord(i))?;
        }
        Ok(())
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn check_compatible(x: &TorusPoint, y: &TorusPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::usage(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    if x.prec != y.prec {
        return Err(Error::usage("torus points have different precisions"));
    }
    Ok(())
}

/// Sup over coordinates of the circle metric.
pub fn torus_metric(x: &TorusPoint, y: &TorusPoint) -> Result<Dyadic> {
    check_compatible(x, y)?;
    Ok(Dyadic::from_raw(raw_torus_distance(x, y), x.prec.bits()))
}

#[inline]
pub(crate) fn raw_torus_distance(x: &TorusPoint, y: &TorusPoint) -> u128 {
    x.coords
        .iter()
        .zip(&y.coords)
        .map(|(&a, &b)| x.prec.raw_distance(a, b))
        .max()
        .unwrap_or(0)
}

/// One application of the skew map, in place. Each coordinate `j ≥ 2` gains
/// the old value of coordinate `j − 1`, so the update runs from the top.
#[inline]
pub fn skew_step_in_place(theta: &mut TorusPoint, alpha_raw: u128) {
    let mask = theta.prec.mask();
    let c = &mut theta.coords;
    for j in (1..c.len()).rev() {
        c[j] = c[j].wrapping_add(c[j - 1]) & mask;
    }
    c[0] = c[0].wrapping_add(alpha_raw) & mask;
}

pub fn skew_step(theta: &TorusPoint, alpha: CircleCoord) -> TorusPoint {
    let mut next = theta.clone();
    skew_step_in_place(&mut next, alpha.raw());
    next
}

/// The inverse map, in place.
pub fn skew_unstep_in_place(theta: &mut TorusPoint, alpha_raw: u128) {
    let mask = theta.prec.mask();
    let c = &mut theta.coords;
    c[0] = c[0].wrapping_sub(alpha_raw) & mask;
    for j in 1..c.len() {
        c[j] = c[j].wrapping_sub(c[j - 1]) & mask;
    }
}

/// Streams the Pascal rows `C(n, 0..=k) mod 2^W` for `n = 0, 1, 2, …`.
#[derive(Debug, Clone)]
pub struct BinomialRows {
    row: Vec<u128>,
    mask: u128,
    n: u64,
}

impl BinomialRows {
    pub fn new(max_k: usize, prec: Precision) -> Self {
        let mut row = vec![0u128; max_k + 1];
        row[0] = 1;
        BinomialRows {
            row,
            mask: prec.mask(),
            n: 0,
        }
    }

    /// The row for the current `n`.
    pub fn current(&self) -> &[u128] {
        &self.row
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn advance(&mut self) {
        for j in (1..self.row.len()).rev() {
            self.row[j] = self.row[j].wrapping_add(self.row[j - 1]) & self.mask;
        }
        self.n += 1;
    }

    pub fn advance_to(&mut self, n: u64) {
        while self.n < n {
            self.advance();
        }
    }
}

/// `C(n, 0..=k) mod 2^W` from exact products, in `O(k)` big-integer steps.
pub fn binomial_row(n: u64, k: usize, prec: Precision) -> Vec<u128> {
    let modulus = BigUint::one() << prec.bits();
    let mut c = BigUint::one();
    let mut out = Vec::with_capacity(k + 1);
    for j in 0..=k as u64 {
        if j > 0 {
            if j > n {
                c = BigUint::zero();
            } else {
                c = c * (n - j + 1) / j;
            }
        }
        out.push((&c % &modulus).to_u128().expect("reduced below 2^W"));
    }
    out
}

/// `C(n, k) mod 2^W`.
pub fn binomial_wrap(n: u64, k: usize, prec: Precision, max_degree: usize) -> Result<u128> {
    Error::check_limit("binomial degree", k as u64, max_degree as u64)?;
    Ok(binomial_row(n, k, prec)[k])
}

/// `C(n, 0..=k) mod 2^W` for signed `n`, using
/// `C(−m, k) = (−1)^k C(m + k − 1, k)` when `n < 0`.
pub fn signed_binomial_row(n: i64, k: usize, prec: Precision) -> Vec<u128> {
    let mask = prec.mask();
    if n >= 0 {
        return binomial_row(n as u64, k, prec);
    }
    let m = n.unsigned_abs();
    let mut out = vec![0u128; k + 1];
    out[0] = 1;
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        let v = binomial_row(m + j as u64 - 1, j, prec)[j];
        *slot = if j % 2 == 1 { v.wrapping_neg() & mask } else { v };
    }
    out
}

/// Applies the closed form given the binomial row `C(n, 0..=d)`.
pub fn skew_from_row(theta: &TorusPoint, alpha_raw: u128, row: &[u128]) -> TorusPoint {
    let mask = theta.prec.mask();
    let d = theta.dim();
    debug_assert!(row.len() > d);
    let coords = (1..=d)
        .map(|j| {
            let mut acc = row[j].wrapping_mul(alpha_raw);
            for i in 1..=j {
                acc = acc.wrapping_add(row[j - i].wrapping_mul(theta.coords[i - 1]));
            }
            acc & mask
        })
        .collect();
    TorusPoint {
        prec: theta.prec,
        coords,
    }
}

/// `Tⁿθ` from the closed form.
pub fn skew_iterate_closed(
    theta: &TorusPoint,
    alpha: CircleCoord,
    n: u64,
    max_degree: usize,
) -> Result<TorusPoint> {
    Error::check_limit("skew dimension", theta.dim() as u64, max_degree as u64)?;
    Ok(skew_from_row(theta, alpha.raw(), &binomial_row(n, theta.dim(), theta.prec)))
}

/// `Tⁿθ` for any signed `n`.
pub fn skew_iterate_signed(
    theta: &TorusPoint,
    alpha: CircleCoord,
    n: i64,
    max_degree: usize,
) -> Result<TorusPoint> {
    Error::check_limit("skew dimension", theta.dim() as u64, max_degree as u64)?;
    let row = signed_binomial_row(n, theta.dim(), theta.prec);
    Ok(skew_from_row(theta, alpha.raw(), &row))
}
