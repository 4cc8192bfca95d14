//! Finite-window combinatorics of subsets of the nonnegative integers.
//!
//! A [`WindowSet`] is what can be observed of an infinite set `F ⊂ ℤ₊` in a
//! window `[0, N)`. The family degrees computed here (longest block, gap
//! bound, longest finite IP set, longest finite difference set) are
//! window-scale statistics; membership of the infinite set in a family is
//! never decided.

mod ramsey;
mod search;
mod window;

pub use ramsey::{ramsey_split_check, RamseyOutcome};
pub use search::{
    classify_window, find_finite_difference, find_finite_difference_with, find_finite_ip,
    FamilyProfile,
};
pub use window::WindowSet;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Search limits for the exponential searches of this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyCaps {
    /// Maximum number of generators passed to [`fs_closure`].
    pub fs_generators: usize,
    /// Maximum finite IP length searched for.
    pub ip_length: usize,
    /// Maximum finite difference length searched for.
    pub diff_length: usize,
    /// Maximum size of the set whose 2-colorings are enumerated.
    pub ramsey_set: usize,
}

impl Default for FamilyCaps {
    fn default() -> Self {
        FamilyCaps {
            fs_generators: 20,
            ip_length: 12,
            diff_length: 10,
            ramsey_set: 15,
        }
    }
}

/// Which pairs enter a difference set `Δ(E)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaConvention {
    /// `{a - b : a > b}`.
    #[default]
    Strict,
    /// `{a - b : a >= b}`, which always contains 0 for nonempty `E`.
    WithZero,
}

/// Generators of a finite IP set, kept in nondecreasing order. Repeated
/// generators are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct GeneratorSeq(Vec<u64>);

impl GeneratorSeq {
    pub fn new(mut gens: Vec<u64>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::usage("generator sequence must be nonempty"));
        }
        if gens.contains(&0) {
            return Err(Error::usage("generators must be positive"));
        }
        gens.sort_unstable();
        Ok(GeneratorSeq(gens))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GeneratorSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "]")
    }
}

/// Evidence that a window set meets a family at some degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyWitness {
    Block { start: u64, length: u64 },
    FiniteIp { gens: GeneratorSeq },
    FiniteDifference { base: Vec<u64> },
    SyndeticBound { bound: u64 },
}

impl FamilyWitness {
    /// Re-checks the witness against `set` directly from its definition.
    pub fn validate(&self, set: &WindowSet) -> bool {
        match self {
            FamilyWitness::Block { start, length } => {
                (*start..start.saturating_add(*length)).all(|e| set.contains(e))
            }
            FamilyWitness::FiniteIp { gens } => match fs_closure(gens, usize::MAX) {
                Ok(sums) => sums.iter().all(|&e| set.contains(e)),
                Err(_) => false,
            },
            FamilyWitness::FiniteDifference { base } => {
                base.first() == Some(&0)
                    && base.windows(2).all(|w| w[0] < w[1])
                    && delta_closure(base, DeltaConvention::Strict)
                        .iter()
                        .all(|&e| set.contains(e))
            }
            FamilyWitness::SyndeticBound { bound } => {
                let n = set.window_end();
                *bound >= 1
                    && *bound <= n
                    && (0..=n - bound).all(|k| set.meets_range(k, k + bound))
            }
        }
    }
}

/// All sums over nonempty index subsets of `gens`, sorted and deduplicated.
pub fn fs_closure(gens: &GeneratorSeq, max_generators: usize) -> Result<Vec<u64>> {
    Error::check_limit("generator count", gens.len() as u64, max_generators as u64)?;
    let mut sums: Vec<u64> = Vec::new();
    for &g in gens.as_slice() {
        let mut next = Vec::with_capacity(sums.len() * 2 + 1);
        next.extend_from_slice(&sums);
        next.push(g);
        for &s in &sums {
            next.push(
                s.checked_add(g)
                    .ok_or_else(|| Error::usage("subset sum overflows u64"))?,
            );
        }
        next.sort_unstable();
        next.dedup();
        sums = next;
    }
    Ok(sums)
}

/// The difference set of `base` under the given convention, sorted.
pub fn delta_closure(base: &[u64], convention: DeltaConvention) -> Vec<u64> {
    let mut elems = base.to_vec();
    elems.sort_unstable();
    elems.dedup();
    let mut out = Vec::with_capacity(elems.len() * elems.len() / 2 + 1);
    if convention == DeltaConvention::WithZero && !elems.is_empty() {
        out.push(0);
    }
    for (j, &a) in elems.iter().enumerate() {
        for &b in &elems[..j] {
            out.push(a - b);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Longest run of consecutive integers in `set`, as `(start, length)`; the
/// earliest run wins ties.
pub fn longest_block(set: &WindowSet) -> Option<(u64, u64)> {
    let mut best: Option<(u64, u64)> = None;
    let elems = set.elements();
    let mut i = 0;
    while i < elems.len() {
        let start = elems[i];
        let mut j = i;
        while j + 1 < elems.len() && elems[j + 1] == elems[j] + 1 {
            j += 1;
        }
        let len = (j - i + 1) as u64;
        if best.is_none_or(|(_, l)| len > l) {
            best = Some((start, len));
        }
        i = j + 1;
    }
    best
}

pub fn max_block_length(set: &WindowSet) -> u64 {
    longest_block(set).map_or(0, |(_, len)| len)
}

/// Smallest `b` such that every window `[k, k + b)` with `0 <= k <= N - b`
/// meets the set; `None` for the empty set.
pub fn min_syndetic_bound(set: &WindowSet) -> Option<u64> {
    let elems = set.elements();
    let first = *elems.first()?;
    let last = *elems.last()?;
    let mut max_gap = first.max(set.window_end() - 1 - last);
    for w in elems.windows(2) {
        max_gap = max_gap.max(w[1] - w[0] - 1);
    }
    Some(max_gap + 1)
}
