//! Brute-force reference implementations.
//!
//! Each routine enumerates its search space directly from the definition and
//! shares no code with the pruned searches it is compared against.

use crate::families::WindowSet;

/// Every nondecreasing sequence of length `len` with entries in `1..=max(S)`,
/// in lexicographic order; returns the first whose subset sums all lie in `S`.
pub fn brute_force_ip(set: &WindowSet, len: usize) -> Option<Vec<u64>> {
    let max = set.max()?;
    if max == 0 || len == 0 {
        return None;
    }
    let mut seq = vec![1u64; len];
    loop {
        let all_in = (1u32..(1u32 << len)).all(|mask| {
            let sum: u64 = (0..len).filter(|&i| mask >> i & 1 == 1).map(|i| seq[i]).sum();
            set.contains(sum)
        });
        if all_in {
            return Some(seq);
        }
        // Advance to the next nondecreasing sequence.
        let mut i = len;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if seq[i] < max {
                seq[i] += 1;
                let v = seq[i];
                for s in seq.iter_mut().skip(i + 1) {
                    *s = v;
                }
                break;
            }
        }
    }
}

/// Every `E ⊆ [0, max(S)]` with `0 ∈ E` and `|E| = len`, in lexicographic
/// order; returns the first whose strict differences all lie in `S`.
pub fn brute_force_difference(set: &WindowSet, len: usize) -> Option<Vec<u64>> {
    if len == 0 {
        return None;
    }
    if len == 1 {
        return Some(vec![0]);
    }
    let max = set.max()?;
    let mut rest: Vec<u64> = (1..len as u64).collect();
    loop {
        if rest.last().is_some_and(|&l| l > max) {
            return None;
        }
        let mut e = vec![0];
        e.extend_from_slice(&rest);
        let ok = e
            .iter()
            .enumerate()
            .all(|(j, &a)| e[..j].iter().all(|&b| set.contains(a - b)));
        if ok {
            return Some(e);
        }
        // Next combination of `rest` from 1..=max.
        let k = rest.len();
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if rest[i] < max - (k - 1 - i) as u64 {
                rest[i] += 1;
                for j in i + 1..k {
                    rest[j] = rest[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Enumerates all 2-colorings of `FS(gens)` and checks each class with
/// [`brute_force_ip`].
pub fn brute_force_ramsey(gens: &[u64], target: usize) -> bool {
    let mut sums: Vec<u64> = (1u32..(1u32 << gens.len()))
        .map(|mask| {
            (0..gens.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| gens[i])
                .sum()
        })
        .collect();
    sums.sort_unstable();
    sums.dedup();
    let window = sums.last().map_or(0, |m| m + 1);
    (0u64..(1u64 << sums.len())).all(|mask| {
        let (red, blue): (Vec<_>, Vec<_>) = sums
            .iter()
            .enumerate()
            .partition(|(i, _)| mask >> i & 1 == 1);
        let red = WindowSet::new(window, red.into_iter().map(|(_, &s)| s).collect()).unwrap();
        let blue = WindowSet::new(window, blue.into_iter().map(|(_, &s)| s).collect()).unwrap();
        brute_force_ip(&red, target).is_some() || brute_force_ip(&blue, target).is_some()
    })
}
