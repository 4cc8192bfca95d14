use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{rational_text, require_positive_rational, Findings, ParamReader};
use crate::analysis::{gillis_select, CellSpace, SearchStatus};
use crate::error::{Error, Result};
use crate::families::{find_finite_difference, find_finite_ip, FamilyCaps, FamilyWitness, WindowSet};
use crate::oracle::{brute_force_difference, brute_force_ip};

#[derive(Default, Clone, Copy)]
struct Tally {
    ip_disagreements: u64,
    diff_disagreements: u64,
    invalid_witnesses: u64,
    ip_found: u64,
    diff_found: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            ip_disagreements: self.ip_disagreements + o.ip_disagreements,
            diff_disagreements: self.diff_disagreements + o.diff_disagreements,
            invalid_witnesses: self.invalid_witnesses + o.invalid_witnesses,
            ip_found: self.ip_found + o.ip_found,
            diff_found: self.diff_found + o.diff_found,
        }
    }
}

fn compare_subset(mask: u64, universe: u64, max_length: usize, caps: &FamilyCaps) -> Result<Tally> {
    let elems: Vec<u64> = (0..universe).filter(|i| mask >> i & 1 == 1).collect();
    let set = WindowSet::new(universe, elems)?;
    let mut t = Tally::default();
    for len in 1..=max_length {
        let ip = find_finite_ip(&set, len, caps)?;
        if ip.as_ref().map(|g| g.as_slice().to_vec()) != brute_force_ip(&set, len) {
            t.ip_disagreements += 1;
        }
        if let Some(gens) = ip {
            t.ip_found += 1;
            if !(FamilyWitness::FiniteIp { gens }).validate(&set) {
                t.invalid_witnesses += 1;
            }
        }
        let diff = find_finite_difference(&set, len, caps)?;
        if diff != brute_force_difference(&set, len) {
            t.diff_disagreements += 1;
        }
        if let Some(base) = diff {
            t.diff_found += 1;
            if !(FamilyWitness::FiniteDifference { base }).validate(&set) {
                t.invalid_witnesses += 1;
            }
        }
    }
    Ok(t)
}

pub(super) fn families_oracle(p: &mut ParamReader, _seed: u64, out: &mut Findings) -> Result<()> {
    let max_length = p.positive("max_length")? as usize;
    let universe = p.positive("universe")?;
    if universe > 20 {
        return Err(Error::usage("parameter universe is limited to 20"));
    }
    let caps = FamilyCaps::default();
    if max_length > caps.ip_length.min(caps.diff_length) {
        return Err(Error::usage(format!(
            "parameter max_length is limited to {}",
            caps.ip_length.min(caps.diff_length)
        )));
    }
    let subsets = 1u64 << universe;
    let tally = (0..subsets)
        .into_par_iter()
        .map(|mask| compare_subset(mask, universe, max_length, &caps))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    out.record("subsets", subsets);
    out.record("ip_witnesses_found", tally.ip_found);
    out.record("difference_witnesses_found", tally.diff_found);
    out.record("ip_disagreements", tally.ip_disagreements);
    out.record("difference_disagreements", tally.diff_disagreements);
    out.check("ip_agrees_with_oracle", tally.ip_disagreements == 0);
    out.check("difference_agrees_with_oracle", tally.diff_disagreements == 0);
    out.check("witnesses_validate", tally.invalid_witnesses == 0);
    Ok(())
}

pub(super) fn gillis(p: &mut ParamReader, seed: u64, out: &mut Findings) -> Result<()> {
    let a = p.rational("a")?;
    let cells = p.positive("cells")? as usize;
    let eps = p.rational("eps")?;
    let k = p.positive("k")? as usize;
    let n_sets = p.positive("sets")? as usize;
    let trials = p.u64("trials")?;
    require_positive_rational("a", &a)?;
    if a > BigRational::from_integer(BigInt::from(1)) {
        return Err(Error::usage("parameter a must be at most 1"));
    }
    if k > n_sets {
        return Err(Error::usage("parameter k must not exceed sets"));
    }
    let scaled = &a * BigRational::from_integer(BigInt::from(cells));
    let size = scaled.ceil().to_integer();
    let size: usize = size.try_into().map_err(|_| Error::usage("set size out of range"))?;
    let space = CellSpace::uniform(cells)?;
    let threshold = num_traits::pow(a.clone(), k) - &eps;
    out.record("set_size", size);
    out.record("threshold", rational_text(&threshold));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut found, mut absent_exhaustive, mut absent_beam) = (0u64, 0u64, 0u64);
    let (mut bound_ok, mut absence_ok) = (true, true);
    let mut first_witness = None;
    for _ in 0..trials {
        let sets = (0..n_sets)
            .map(|_| space.set(&sample(&mut rng, cells, size).into_vec()))
            .collect::<Result<Vec<_>>>()?;
        let outcome = gillis_select(&space, &sets, &a, k, &eps)?;
        match (&outcome.indices, outcome.status) {
            (Some(idx), _) => {
                found += 1;
                let mut inter = space.full_set();
                for &i in idx {
                    inter = inter.intersection(&sets[i]);
                }
                let strictly_increasing = idx.windows(2).all(|w| w[0] < w[1]);
                bound_ok &= strictly_increasing && idx.len() == k && space.measure(&inter) >= threshold;
                if first_witness.is_none() {
                    first_witness = Some((idx.clone(), space.measure(&inter)));
                }
            }
            (None, SearchStatus::AbsentExhaustive) => {
                absent_exhaustive += 1;
                absence_ok &= k != 2 || no_pair_qualifies(&space, &sets, &threshold);
            }
            (None, _) => absent_beam += 1,
        }
    }
    out.record("found", format!("{found}/{trials}"));
    out.record("absent_exhaustive", absent_exhaustive);
    out.record("absent_budget", absent_beam);
    if let Some((idx, m)) = first_witness {
        out.record_json("first_witness", &idx);
        out.record("first_witness_measure", rational_text(&m));
    }
    out.check("bounds_verified_exactly", bound_ok);
    out.check("absences_reconfirmed", absence_ok);
    Ok(())
}

/// Independent double loop over all pairs.
fn no_pair_qualifies(space: &CellSpace, sets: &[crate::analysis::CellSet], threshold: &BigRational) -> bool {
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let common = sets[i].cells().filter(|&c| sets[j].contains(c)).count() as u64;
            let m = BigRational::new(BigInt::from(common), BigInt::from(space.total_weight()));
            if &m >= threshold {
                return false;
            }
        }
    }
    true
}
