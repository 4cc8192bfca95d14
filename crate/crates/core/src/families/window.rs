use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, ParseError, Result};

/// A finite subset of `[0, window_end)`, stored as a strictly increasing list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowSet {
    window_end: u64,
    elements: Vec<u64>,
}

impl WindowSet {
    pub fn new(window_end: u64, mut elements: Vec<u64>) -> Result<Self> {
        elements.sort_unstable();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::usage("window set elements must be distinct"));
        }
        if let Some(&last) = elements.last() {
            if last >= window_end {
                return Err(Error::usage(format!(
                    "element {last} outside window [0, {window_end})"
                )));
            }
        }
        Ok(WindowSet {
            window_end,
            elements,
        })
    }

    pub fn empty(window_end: u64) -> Self {
        WindowSet {
            window_end,
            elements: Vec::new(),
        }
    }

    pub fn full(window_end: u64) -> Self {
        WindowSet {
            window_end,
            elements: (0..window_end).collect(),
        }
    }

    /// Builds the set `{n : indicator[n]}` in the window `[0, indicator.len())`.
    pub fn from_indicator(indicator: &[bool]) -> Self {
        WindowSet {
            window_end: indicator.len() as u64,
            elements: indicator
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i as u64)
                .collect(),
        }
    }

    /// Smallest window holding all of `elements`.
    pub fn tight(elements: Vec<u64>) -> Result<Self> {
        let end = elements.iter().max().map_or(0, |m| m + 1);
        WindowSet::new(end, elements)
    }

    pub fn window_end(&self) -> u64 {
        self.window_end
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    pub fn contains(&self, e: u64) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    /// Whether the set meets `[lo, hi)`.
    pub fn meets_range(&self, lo: u64, hi: u64) -> bool {
        let i = self.elements.partition_point(|&e| e < lo);
        i < self.elements.len() && self.elements[i] < hi
    }

    pub fn is_subset(&self, other: &WindowSet) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }

    pub fn intersection(&self, other: &WindowSet) -> WindowSet {
        WindowSet {
            window_end: self.window_end.min(other.window_end),
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|&e| other.contains(e))
                .collect(),
        }
    }

    /// Complement within the window.
    pub fn complement(&self) -> WindowSet {
        WindowSet {
            window_end: self.window_end,
            elements: (0..self.window_end).filter(|&e| !self.contains(e)).collect(),
        }
    }

    /// Dense membership table over `[0, max + 1)`.
    pub(crate) fn indicator(&self) -> Vec<bool> {
        let mut table = vec![false; self.max().map_or(0, |m| m as usize + 1)];
        for &e in &self.elements {
            table[e as usize] = true;
        }
        table
    }
}

impl fmt::Display for WindowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "@{}", self.window_end)
    }
}

impl FromStr for WindowSet {
    type Err = ParseError;

    /// Parses `e1,e2,...@N`; `@N` alone is the empty set.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let at = s
            .find('@')
            .ok_or_else(|| ParseError::new(s, s.len(), "missing '@N' window suffix"))?;
        let window_text = &s[at + 1..];
        let window_end: u64 = window_text
            .parse()
            .map_err(|_| ParseError::new(s, at + 1, "window size must be a nonnegative integer"))?;
        let mut elements = Vec::new();
        let body = &s[..at];
        if !body.trim().is_empty() {
            let mut pos = 0;
            for piece in body.split(',') {
                let lead = piece.len() - piece.trim_start().len();
                let value: u64 = piece.trim().parse().map_err(|_| {
                    ParseError::new(s, pos + lead, format!("bad element {:?}", piece.trim()))
                })?;
                if value >= window_end {
                    return Err(ParseError::new(
                        s,
                        pos + lead,
                        format!("element {value} outside window [0, {window_end})"),
                    ));
                }
                if elements.contains(&value) {
                    return Err(ParseError::new(s, pos + lead, format!("duplicate element {value}")));
                }
                elements.push(value);
                pos += piece.len() + 1;
            }
        }
        elements.sort_unstable();
        Ok(WindowSet {
            window_end,
            elements,
        })
    }
}

impl Serialize for WindowSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
