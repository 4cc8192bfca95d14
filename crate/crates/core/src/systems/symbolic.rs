//! Rule-defined two-sided binary sequences: the Morse sequence ω, its
//! companion η, flips, shifts and periodic words.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::dyadic::{Dyadic, MetricValue};
use crate::error::{Error, ParseError, Result};

/// Default bound on the nesting depth of a rule tree.
pub const DEFAULT_RULE_DEPTH: usize = 64;

/// Two-sided Morse sequence: `ω(n)` is the parity of the set bits of `n` for
/// `n ≥ 0`, and `ω(−m) = ω(m − 1)` for `m ≥ 1`.
#[inline]
pub fn morse_symbol(n: i64) -> u8 {
    // For n < 0, −n − 1 = !n in two's complement.
    let m = if n >= 0 { n as u64 } else { !(n as u64) };
    (m.count_ones() & 1) as u8
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolicPoint {
    MorseOmega,
    /// `ξ(i) = word[i mod |word|]`.
    Periodic(Arc<[u8]>),
    Flip(Arc<SymbolicPoint>),
    /// `η(n) = ω(n)` for `n ≥ 0`, `1 − ω(n)` for `n < 0`.
    Eta,
    /// `σᵏξ`, evaluated as `ξ(i + k)`.
    Shift(Arc<SymbolicPoint>, i64),
}

impl SymbolicPoint {
    pub fn flip(self) -> SymbolicPoint {
        SymbolicPoint::Flip(Arc::new(self))
    }

    pub fn periodic(word: &[u8]) -> Result<SymbolicPoint> {
        if word.is_empty() || word.iter().any(|&b| b > 1) {
            return Err(Error::usage("periodic word must be a nonempty binary word"));
        }
        Ok(SymbolicPoint::Periodic(word.into()))
    }

    /// `σᵏ` applied to `self`, merging into an outer shift so that repeated
    /// shifting does not deepen the rule tree.
    pub fn shifted(&self, k: i64) -> Result<SymbolicPoint> {
        match self {
            SymbolicPoint::Shift(inner, off) => {
                let total = off
                    .checked_add(k)
                    .ok_or_else(|| Error::usage("shift offset overflows i64"))?;
                if total == 0 {
                    Ok((**inner).clone())
                } else {
                    Ok(SymbolicPoint::Shift(inner.clone(), total))
                }
            }
            _ if k == 0 => Ok(self.clone()),
            _ => Ok(SymbolicPoint::Shift(Arc::new(self.clone()), k)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SymbolicPoint::MorseOmega | SymbolicPoint::Eta | SymbolicPoint::Periodic(_) => 1,
            SymbolicPoint::Flip(inner) | SymbolicPoint::Shift(inner, _) => 1 + inner.depth(),
        }
    }

    /// Parses the expression grammar
    /// `omega | eta | flip(P) | shift(k, P) | periodic(01…)`.
    pub fn parse(text: &str) -> Result<SymbolicPoint, ParseError> {
        let mut p = RuleParser { text, pos: 0 };
        let point = p.point()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(ParseError::new(text, p.pos, "unexpected trailing input"));
        }
        Ok(point)
    }
}

/// `ξ(i)` for the rule tree `p`, refusing trees deeper than `max_depth`.
pub fn symbolic_eval(p: &SymbolicPoint, i: i64, max_depth: usize) -> Result<u8> {
    let mut flips = 0u8;
    let mut at = i;
    let mut node = p;
    let mut depth = 1;
    loop {
        if depth > max_depth {
            return Err(Error::ResourceLimit {
                what: "rule depth",
                requested: p.depth() as u64,
                limit: max_depth as u64,
            });
        }
        let base = match node {
            SymbolicPoint::MorseOmega => morse_symbol(at),
            SymbolicPoint::Eta => {
                let w = morse_symbol(at);
                if at >= 0 {
                    w
                } else {
                    1 - w
                }
            }
            SymbolicPoint::Periodic(word) => word[at.rem_euclid(word.len() as i64) as usize],
            SymbolicPoint::Flip(inner) => {
                flips ^= 1;
                node = inner;
                depth += 1;
                continue;
            }
            SymbolicPoint::Shift(inner, k) => {
                at = at
                    .checked_add(*k)
                    .ok_or_else(|| Error::usage("coordinate overflows i64"))?;
                node = inner;
                depth += 1;
                continue;
            }
        };
        return Ok(base ^ flips);
    }
}

/// `2^{−m}` where `m` is the smallest `|i| ≤ radius` with `p(i) ≠ q(i)`, or
/// an upper bound `2^{−(radius+1)}` when the scan finds no difference.
pub fn symbolic_metric(p: &SymbolicPoint, q: &SymbolicPoint, radius: u32, max_depth: usize) -> Result<MetricValue> {
    for m in 0..=radius {
        let m_i = m as i64;
        if symbolic_eval(p, m_i, max_depth)? != symbolic_eval(q, m_i, max_depth)?
            || (m > 0 && symbolic_eval(p, -m_i, max_depth)? != symbolic_eval(q, -m_i, max_depth)?)
        {
            return Ok(MetricValue::Exact(Dyadic::pow2_neg(m)));
        }
    }
    Ok(MetricValue::AtMost(Dyadic::pow2_neg(radius + 1)))
}

/// Dyadic odometer coordinates `a_m = k mod 2^m`, `m = 1..=levels`, of a
/// shifted Morse base point `σᵏξ` with `ξ ∈ {ω, ω̄, η, η̄}`.
pub fn odometer_coordinate(p: &SymbolicPoint, levels: u32) -> Result<Vec<u64>> {
    if levels > 63 {
        return Err(Error::ResourceLimit {
            what: "odometer levels",
            requested: levels as u64,
            limit: 63,
        });
    }
    let mut offset: i64 = 0;
    let mut node = p;
    loop {
        match node {
            SymbolicPoint::Shift(inner, k) => {
                offset = offset
                    .checked_add(*k)
                    .ok_or_else(|| Error::usage("shift offset overflows i64"))?;
                node = inner;
            }
            // Flipping commutes with the shift and leaves the odometer
            // coordinate unchanged.
            SymbolicPoint::Flip(inner) => node = inner,
            SymbolicPoint::MorseOmega | SymbolicPoint::Eta => break,
            SymbolicPoint::Periodic(_) => {
                return Err(Error::Unsupported(format!(
                    "odometer coordinate of {p}: periodic points are not in the Morse system"
                )))
            }
        }
    }
    Ok((1..=levels)
        .map(|m| offset.rem_euclid(1i64 << m) as u64)
        .collect())
}

impl fmt::Display for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicPoint::MorseOmega => write!(f, "omega"),
            SymbolicPoint::Eta => write!(f, "eta"),
            SymbolicPoint::Periodic(word) => {
                write!(f, "periodic(")?;
                for b in word.iter() {
                    write!(f, "{b}")?;
                }
                write!(f, ")")
            }
            SymbolicPoint::Flip(inner) => write!(f, "flip({inner})"),
            SymbolicPoint::Shift(inner, k) => write!(f, "shift({k}, {inner})"),
        }
    }
}

impl Serialize for SymbolicPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RuleParser<'a> {
    text: &'a str,
    pos: usize,
}

impl RuleParser<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.text, self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn point(&mut self) -> Result<SymbolicPoint, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident().to_string();
        match name.as_str() {
            "omega" => Ok(SymbolicPoint::MorseOmega),
            "eta" => Ok(SymbolicPoint::Eta),
            "flip" => {
                self.expect('(')?;
                let inner = self.point()?;
                self.expect(')')?;
                Ok(inner.flip())
            }
            "shift" => {
                self.expect('(')?;
                self.skip_ws();
                let num_start = self.pos;
                if self.text[self.pos..].starts_with('-') {
                    self.pos += 1;
                }
                while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let k: i64 = self.text[num_start..self.pos]
                    .parse()
                    .map_err(|_| ParseError::new(self.text, num_start, "expected an integer offset"))?;
                self.expect(',')?;
                let inner = self.point()?;
                self.expect(')')?;
                Ok(SymbolicPoint::Shift(Arc::new(inner), k))
            }
            "periodic" => {
                self.expect('(')?;
                self.skip_ws();
                let mut word = Vec::new();
                while let Some(c) = self.text[self.pos..].chars().next() {
                    match c {
                        '0' => word.push(0),
                        '1' => word.push(1),
                        _ => break,
                    }
                    self.pos += 1;
                }
                if word.is_empty() {
                    return Err(self.err("expected a binary word"));
                }
                self.expect(')')?;
                Ok(SymbolicPoint::Periodic(word.into()))
            }
            "" => Err(self.err("expected a symbolic point")),
            other => Err(ParseError::new(self.text, start, format!("unknown rule {other:?}"))),
        }
    }
}
