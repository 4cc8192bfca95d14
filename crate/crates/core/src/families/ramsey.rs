use serde::Serialize;

use super::{find_finite_ip, fs_closure, FamilyCaps, GeneratorSeq, WindowSet};
use crate::error::{Error, Result};

/// Verdict of an exhaustive 2-coloring probe of `FS(gens)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamseyOutcome {
    pub holds: bool,
    pub colorings_checked: u64,
    /// The first coloring (in mask order) where neither class contains a
    /// finite IP set of the target length.
    pub counterexample: Option<(WindowSet, WindowSet)>,
}

/// Checks whether every 2-coloring of `FS(gens)` leaves a color class that
/// contains a finite IP set of length `target`.
pub fn ramsey_split_check(gens: &GeneratorSeq, target: usize, caps: &FamilyCaps) -> Result<RamseyOutcome> {
    if target == 0 {
        return Err(Error::usage("target length must be positive"));
    }
    let sums = fs_closure(gens, caps.fs_generators)?;
    Error::check_limit("finite sum set size", sums.len() as u64, caps.ramsey_set as u64)?;
    Error::check_limit("finite IP length", target as u64, caps.ip_length as u64)?;

    let window = sums.last().map_or(0, |m| m + 1);
    let colorings = 1u64 << sums.len();
    for mask in 0..colorings {
        let (mut red, mut blue) = (Vec::new(), Vec::new());
        for (i, &s) in sums.iter().enumerate() {
            if mask >> i & 1 == 1 {
                red.push(s);
            } else {
                blue.push(s);
            }
        }
        let red = WindowSet::new(window, red)?;
        let blue = WindowSet::new(window, blue)?;
        if find_finite_ip(&red, target, caps)?.is_none() && find_finite_ip(&blue, target, caps)?.is_none() {
            return Ok(RamseyOutcome {
                holds: false,
                colorings_checked: mask + 1,
                counterexample: Some((red, blue)),
            });
        }
    }
    Ok(RamseyOutcome {
        holds: true,
        colorings_checked: colorings,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn gens(g: &[u64]) -> GeneratorSeq {
        GeneratorSeq::new(g.to_vec()).unwrap()
    }

    #[test]
    fn single_generator() {
        let out = ramsey_split_check(&gens(&[1]), 1, &FamilyCaps::default()).unwrap();
        assert!(out.holds);
        assert_eq!(out.colorings_checked, 2);
    }

    #[test]
    fn two_generators_agree_with_oracle() {
        let out = ramsey_split_check(&gens(&[1, 2]), 2, &FamilyCaps::default()).unwrap();
        assert_eq!(out.holds, oracle::brute_force_ramsey(&[1, 2], 2));
        assert!(!out.holds);
        let (red, blue) = out.counterexample.unwrap();
        assert!(oracle::brute_force_ip(&red, 2).is_none());
        assert!(oracle::brute_force_ip(&blue, 2).is_none());
    }

    #[test]
    fn target_beyond_length_fails() {
        for g in [[1u64, 3], [2, 5], [1, 10]] {
            let out = ramsey_split_check(&gens(&g), 3, &FamilyCaps::default()).unwrap();
            assert!(!out.holds);
            assert_eq!(out.holds, oracle::brute_force_ramsey(&g, 3));
        }
    }

    #[test]
    fn small_generator_sets_match_oracle() {
        let cases: &[&[u64]] = &[&[1, 1], &[1, 1, 1], &[1, 2, 4], &[1, 1, 2], &[2, 3], &[1, 2, 3]];
        for g in cases {
            for target in 1..=3 {
                let out = ramsey_split_check(&gens(g), target, &FamilyCaps::default()).unwrap();
                assert_eq!(out.holds, oracle::brute_force_ramsey(g, target), "{g:?} target {target}");
            }
        }
    }

    #[test]
    fn oversized_set_is_rejected() {
        let out = ramsey_split_check(&gens(&[1, 2, 4, 8]), 2, &FamilyCaps::default());
        assert!(out.is_ok());
        let out = ramsey_split_check(&gens(&[1, 2, 4, 8, 16]), 2, &FamilyCaps::default());
        assert!(matches!(out, Err(Error::ResourceLimit { requested: 31, limit: 15, .. })));
    }
}
