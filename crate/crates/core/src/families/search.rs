//! Canonical witness search for finite IP sets and finite difference sets.
//!
//! Both searches are depth-first over candidates in increasing order, so the
//! first complete witness found is the lexicographically smallest one.

use serde::Serialize;

use super::{
    longest_block, min_syndetic_bound, DeltaConvention, FamilyCaps, FamilyWitness, GeneratorSeq,
    WindowSet,
};
use crate::error::{Error, Result};

/// Lexicographically smallest nondecreasing `gens` of length `len` with
/// `FS(gens) ⊆ set`.
pub fn find_finite_ip(set: &WindowSet, len: usize, caps: &FamilyCaps) -> Result<Option<GeneratorSeq>> {
    if len == 0 {
        return Err(Error::usage("finite IP length must be positive"));
    }
    Error::check_limit("finite IP length", len as u64, caps.ip_length as u64)?;
    let member = set.indicator();
    let candidates: Vec<u64> = set.elements().iter().copied().filter(|&e| e >= 1).collect();
    let mut gens = Vec::with_capacity(len);
    if ip_dfs(&member, &candidates, len, &mut gens, &[]) {
        Ok(Some(GeneratorSeq(gens)))
    } else {
        Ok(None)
    }
}

fn ip_dfs(member: &[bool], candidates: &[u64], len: usize, gens: &mut Vec<u64>, sums: &[u64]) -> bool {
    if gens.len() == len {
        return true;
    }
    let limit = member.len() as u64;
    let largest = sums.last().copied().unwrap_or(0);
    let floor = gens.last().copied().unwrap_or(1);
    let start = candidates.partition_point(|&c| c < floor);
    for &g in &candidates[start..] {
        if g + largest >= limit {
            // Every larger candidate overshoots too.
            break;
        }
        if !sums.iter().all(|&s| member[(s + g) as usize]) {
            continue;
        }
        let next = merge_sums(sums, g);
        gens.push(g);
        if ip_dfs(member, candidates, len, gens, &next) {
            return true;
        }
        gens.pop();
    }
    false
}

/// `sums ∪ {g} ∪ (sums + g)`, sorted and deduplicated; `sums` is sorted.
fn merge_sums(sums: &[u64], g: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(2 * sums.len() + 1);
    let shifted = std::iter::once(g).chain(sums.iter().map(|s| s + g));
    let mut a = sums.iter().copied().peekable();
    let mut b = shifted.peekable();
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(&x), Some(&y)) if x <= y => {
                a.next();
                x
            }
            (_, Some(&y)) => {
                b.next();
                y
            }
            (Some(&x), None) => {
                a.next();
                x
            }
            (None, None) => break,
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// Lexicographically smallest `E` with `min(E) = 0`, `|E| = len` and strict
/// `Δ(E) ⊆ set`.
pub fn find_finite_difference(set: &WindowSet, len: usize, caps: &FamilyCaps) -> Result<Option<Vec<u64>>> {
    find_finite_difference_with(set, len, caps, DeltaConvention::Strict)
}

pub fn find_finite_difference_with(
    set: &WindowSet,
    len: usize,
    caps: &FamilyCaps,
    convention: DeltaConvention,
) -> Result<Option<Vec<u64>>> {
    if len == 0 {
        return Err(Error::usage("finite difference length must be positive"));
    }
    Error::check_limit("finite difference length", len as u64, caps.diff_length as u64)?;
    if convention == DeltaConvention::WithZero && !set.contains(0) {
        return Ok(None);
    }
    let member = set.indicator();
    let mut base = vec![0u64];
    if diff_dfs(&member, set.elements(), len, &mut base) {
        Ok(Some(base))
    } else {
        Ok(None)
    }
}

fn diff_dfs(member: &[bool], candidates: &[u64], len: usize, base: &mut Vec<u64>) -> bool {
    if base.len() == len {
        return true;
    }
    let last = *base.last().expect("base starts with 0");
    let start = candidates.partition_point(|&c| c <= last);
    for &e in &candidates[start..] {
        if base[1..].iter().all(|&b| member[(e - b) as usize]) {
            base.push(e);
            if diff_dfs(member, candidates, len, base) {
                return true;
            }
            base.pop();
        }
    }
    false
}

/// Window-scale family degrees of a set, each backed by a stored witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyProfile {
    pub set: WindowSet,
    pub cardinality: u64,
    pub max_block_length: u64,
    pub block_witness: Option<FamilyWitness>,
    pub syndetic_bound: Option<u64>,
    pub syndetic_witness: Option<FamilyWitness>,
    pub max_ip_length: u64,
    /// Canonical witness for each length `1..=max_ip_length`.
    pub ip_witnesses: Vec<GeneratorSeq>,
    pub max_diff_length: u64,
    /// Canonical witness for each length `1..=max_diff_length`.
    pub diff_witnesses: Vec<Vec<u64>>,
    pub ip_cap: usize,
    pub diff_cap: usize,
}

impl FamilyProfile {
    /// Re-validates every stored witness against the profiled set.
    pub fn validate(&self) -> bool {
        let s = &self.set;
        let block_ok = match &self.block_witness {
            Some(w @ FamilyWitness::Block { length, .. }) => {
                *length == self.max_block_length && w.validate(s)
            }
            Some(_) => false,
            None => self.max_block_length == 0,
        };
        let synd_ok = match (&self.syndetic_witness, self.syndetic_bound) {
            (Some(w @ FamilyWitness::SyndeticBound { bound }), Some(b)) => *bound == b && w.validate(s),
            (None, None) => true,
            _ => false,
        };
        let ip_ok = self.ip_witnesses.len() as u64 == self.max_ip_length
            && self.ip_witnesses.iter().enumerate().all(|(i, g)| {
                g.len() == i + 1 && FamilyWitness::FiniteIp { gens: g.clone() }.validate(s)
            });
        let diff_ok = self.diff_witnesses.len() as u64 == self.max_diff_length
            && self.diff_witnesses.iter().enumerate().all(|(i, b)| {
                b.len() == i + 1 && FamilyWitness::FiniteDifference { base: b.clone() }.validate(s)
            });
        block_ok && synd_ok && ip_ok && diff_ok
    }
}

/// Computes every family degree of `set` up to the caps in `caps`.
///
/// The difference degree only counts difference sets with at least one
/// difference, so the empty set has degree 0 even though `Δ({0}) = ∅` is
/// contained in it.
pub fn classify_window(set: &WindowSet, caps: &FamilyCaps) -> Result<FamilyProfile> {
    let block = longest_block(set);
    let syndetic_bound = min_syndetic_bound(set);

    let mut ip_witnesses = Vec::new();
    for len in 1..=caps.ip_length {
        match find_finite_ip(set, len, caps)? {
            Some(g) => ip_witnesses.push(g),
            None => break,
        }
    }
    let mut diff_witnesses = Vec::new();
    if !set.is_empty() {
        for len in 1..=caps.diff_length {
            match find_finite_difference(set, len, caps)? {
                Some(b) => diff_witnesses.push(b),
                None => break,
            }
        }
    }

    Ok(FamilyProfile {
        set: set.clone(),
        cardinality: set.len() as u64,
        max_block_length: block.map_or(0, |(_, l)| l),
        block_witness: block.map(|(start, length)| FamilyWitness::Block { start, length }),
        syndetic_bound,
        syndetic_witness: syndetic_bound.map(|bound| FamilyWitness::SyndeticBound { bound }),
        max_ip_length: ip_witnesses.len() as u64,
        ip_witnesses,
        max_diff_length: diff_witnesses.len() as u64,
        diff_witnesses,
        ip_cap: caps.ip_length,
        diff_cap: caps.diff_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn ws(elems: &[u64], n: u64) -> WindowSet {
        WindowSet::new(n, elems.to_vec()).unwrap()
    }

    fn caps() -> FamilyCaps {
        FamilyCaps::default()
    }

    #[test]
    fn ip_examples() {
        let g = find_finite_ip(&ws(&[1, 2, 3], 4), 2, &caps()).unwrap();
        assert_eq!(g.unwrap().as_slice(), &[1, 1]);
        assert_eq!(find_finite_ip(&ws(&[1, 4], 5), 2, &caps()).unwrap(), None);
        assert_eq!(find_finite_ip(&ws(&[], 5), 3, &caps()).unwrap(), None);
    }

    #[test]
    fn ip_examples_match_oracle() {
        assert_eq!(oracle::brute_force_ip(&ws(&[1, 2, 3], 4), 2), Some(vec![1, 1]));
        assert_eq!(oracle::brute_force_ip(&ws(&[1, 4], 5), 2), None);
    }

    #[test]
    fn ip_cap_errors() {
        let s = WindowSet::full(64);
        assert!(matches!(
            find_finite_ip(&s, 13, &caps()),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(find_finite_ip(&s, 0, &caps()).is_err());
        assert!(matches!(
            find_finite_difference(&s, 11, &caps()),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn difference_examples() {
        assert_eq!(
            find_finite_difference(&ws(&[2, 3, 5], 6), 3, &caps()).unwrap(),
            Some(vec![0, 2, 5])
        );
        assert_eq!(oracle::brute_force_difference(&ws(&[2, 3, 5], 6), 3), Some(vec![0, 2, 5]));
        assert_eq!(find_finite_difference(&ws(&[1, 4], 5), 3, &caps()).unwrap(), None);
        assert_eq!(oracle::brute_force_difference(&ws(&[1, 4], 5), 3), None);
        assert_eq!(find_finite_difference(&ws(&[], 5), 1, &caps()).unwrap(), Some(vec![0]));
        assert_eq!(find_finite_difference(&ws(&[7], 9), 1, &caps()).unwrap(), Some(vec![0]));
    }

    #[test]
    fn difference_with_zero_needs_zero() {
        let s = ws(&[2, 3, 5], 6);
        assert_eq!(
            find_finite_difference_with(&s, 2, &caps(), DeltaConvention::WithZero).unwrap(),
            None
        );
        let s0 = ws(&[0, 2, 3, 5], 6);
        assert_eq!(
            find_finite_difference_with(&s0, 3, &caps(), DeltaConvention::WithZero).unwrap(),
            Some(vec![0, 2, 5])
        );
    }

    #[test]
    fn classify_full_window() {
        let p = classify_window(&WindowSet::full(64), &caps()).unwrap();
        assert_eq!(p.max_block_length, 64);
        assert_eq!(p.syndetic_bound, Some(1));
        assert_eq!(p.max_ip_length, 12);
        assert_eq!(p.max_diff_length, 10);
        assert!(p.validate());
    }

    #[test]
    fn classify_empty() {
        let p = classify_window(&WindowSet::empty(8), &caps()).unwrap();
        assert_eq!(p.max_block_length, 0);
        assert_eq!(p.syndetic_bound, None);
        assert_eq!(p.max_ip_length, 0);
        assert_eq!(p.max_diff_length, 0);
        assert!(p.validate());
    }

    #[test]
    fn classify_small() {
        let p = classify_window(&"1,2,3@8".parse().unwrap(), &caps()).unwrap();
        assert_eq!(p.max_block_length, 3);
        assert!(p.max_ip_length >= 2);
        assert_eq!(p.ip_witnesses[1].as_slice(), &[1, 1]);
        assert!(p.validate());
    }

    fn subset_of_16() -> impl Strategy<Value = WindowSet> {
        any::<u16>().prop_map(|m| {
            WindowSet::from_indicator(&(0..16).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        })
    }

    proptest! {
        #[test]
        fn witnesses_are_sound(s in subset_of_16(), len in 1usize..=5) {
            if let Some(g) = find_finite_ip(&s, len, &caps()).unwrap() {
                prop_assert_eq!(g.len(), len);
                let w = FamilyWitness::FiniteIp { gens: g };
                prop_assert!(w.validate(&s));
            }
            if let Some(b) = find_finite_difference(&s, len, &caps()).unwrap() {
                prop_assert_eq!(b.len(), len);
                let w = FamilyWitness::FiniteDifference { base: b };
                prop_assert!(w.validate(&s));
            }
        }

        #[test]
        fn profile_degrees_are_monotone(a in any::<u16>(), b in any::<u16>()) {
            let small = WindowSet::from_indicator(&(0..16).map(|i| (a & b) >> i & 1 == 1).collect::<Vec<_>>());
            let big = WindowSet::from_indicator(&(0..16).map(|i| a >> i & 1 == 1).collect::<Vec<_>>());
            let ps = classify_window(&small, &caps()).unwrap();
            let pb = classify_window(&big, &caps()).unwrap();
            prop_assert!(ps.max_block_length <= pb.max_block_length);
            prop_assert!(ps.max_ip_length <= pb.max_ip_length);
            prop_assert!(ps.max_diff_length <= pb.max_diff_length);
            for g in &ps.ip_witnesses {
                let w = FamilyWitness::FiniteIp { gens: g.clone() };
                prop_assert!(w.validate(&big));
            }
        }

        #[test]
        fn difference_witness_is_canonical(s in subset_of_16(), t in 0u64..50) {
            if let Some(b) = find_finite_difference(&s, 3, &caps()).unwrap() {
                prop_assert_eq!(b[0], 0);
                let shifted: Vec<u64> = b.iter().map(|x| x + t).collect();
                prop_assert_eq!(
                    super::super::delta_closure(&b, DeltaConvention::Strict),
                    super::super::delta_closure(&shifted, DeltaConvention::Strict)
                );
            }
        }

        #[test]
        fn search_is_deterministic(s in subset_of_16()) {
            prop_assert_eq!(classify_window(&s, &caps()).unwrap(), classify_window(&s, &caps()).unwrap());
        }
    }
}
