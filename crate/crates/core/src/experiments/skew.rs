use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Findings, ParamReader};
use crate::analysis::{sensitivity_set, Budget, Dynamics, NeighborhoodSpec, SkewProduct};
use crate::dyadic::{Dyadic, Exceedance};
use crate::error::{Error, Result};
use crate::families::{longest_block, FamilyWitness, WindowSet};
use crate::systems::torus::{skew_from_row, skew_step_in_place, BinomialRows, TorusPoint};

pub(super) fn ft_sensitive(p: &mut ParamReader, _seed: u64, out: &mut Findings) -> Result<()> {
    let prec = p.precision()?;
    let alpha = p.circle("alpha", prec)?;
    let target = p.u64("block_target")?;
    let delta = p.dyadic("delta", prec.bits())?;
    let grid = p.positive("grid")? as usize;
    let radius = p.dyadic("radius", prec.bits())?;
    let window = p.positive("window")?;
    let sys = SkewProduct::new(alpha, 2)?;
    let budget = Budget::default();
    let u = NeighborhoodSpec::ball(TorusPoint::zero(2, prec), radius);
    out.record("system", sys.label());
    out.record("neighborhood", format!("ball:{}:{radius}", TorusPoint::zero(2, prec)));

    let sens = sensitivity_set(&sys, &u, delta, window, grid, &budget)?;
    out.record("sensitivity_count", sens.len());
    let block = longest_block(&sens);
    let (start, length) = block.unwrap_or((0, 0));
    if block.is_some() {
        out.record_json("block_witness", &FamilyWitness::Block { start, length });
    }
    out.record("block_length", length);

    // Re-derive every time in the block from closed-form iterates of the
    // sample points.
    let samples = sys.samples(&u, grid, &budget)?;
    let mut revalidated = true;
    for n in start..start + length {
        let pts = samples
            .iter()
            .map(|s| sys.iterate(s, n as i64))
            .collect::<Result<Vec<_>>>()?;
        let mut hit = false;
        'pairs: for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                if sys.distance(a, b)?.compare_threshold(delta) == Exceedance::Exceeds {
                    hit = true;
                    break 'pairs;
                }
            }
        }
        revalidated &= hit;
    }
    out.check("block_revalidated", revalidated);
    out.expect_found("block_of_target_length", length >= target);
    Ok(())
}

/// Uniform raw value with magnitude below `bound`.
fn small_coordinate(rng: &mut ChaCha8Rng, bound: u128, mask: u128) -> u128 {
    let span = 2 * (bound - 1) + 1;
    rng.random_range(0..span).wrapping_sub(bound - 1) & mask
}

fn magnitude_raw(raw: u128, prec: crate::systems::Precision) -> u128 {
    prec.raw_distance(raw, 0)
}

pub(super) fn orbit_set_containments(p: &mut ParamReader, seed: u64, out: &mut Findings) -> Result<()> {
    let prec = p.precision()?;
    let alpha = p.circle("alpha", prec)?;
    let d = p.u64("d")? as usize;
    let delta = p.dyadic("delta", prec.bits())?;
    let samples = p.positive("samples")?;
    let window = p.positive("window")?;
    if !(2..=8).contains(&d) {
        return Err(Error::usage("parameter d must be in 2..=8"));
    }
    let delta_raw = prec.raw_of(delta)?;
    if delta_raw < 2 || delta > Dyadic::pow2_neg(1) {
        return Err(Error::usage("parameter delta must lie in (0, 1/2] and be above the grid"));
    }
    Error::check_limit("sample-steps", samples.saturating_mul(window), Budget::default().orbit_steps)?;
    let sys = SkewProduct::new(alpha, d)?;
    let mask = prec.mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.record("system", sys.label());
    out.record("metric", "sup over coordinates");

    let mut closed_ok = true;
    let mut decomposition_ok = true;
    let (mut f2_in_f3, mut f1_f2_disjoint, mut partition) = (true, true, true);
    let (mut f1_sizes, mut f2_sizes) = (Vec::new(), Vec::new());
    for _ in 0..samples {
        let y_raw: Vec<u128> = (0..d).map(|_| small_coordinate(&mut rng, delta_raw, mask)).collect();
        let y = TorusPoint::from_raw(y_raw.clone(), prec)?;
        let tail = TorusPoint::from_raw(y_raw[1..].to_vec(), prec)?;
        let base = y_raw[0];

        let mut stepped_y = y.clone();
        let mut stepped_0 = TorusPoint::zero(d, prec);
        let mut rows = BinomialRows::new(d, prec);
        let (mut f1, mut f2) = (Vec::new(), Vec::new());
        for n in 0..window {
            let row = rows.current();
            let closed_y = skew_from_row(&y, alpha.raw(), row);
            let closed_0 = skew_from_row(&TorusPoint::zero(d, prec), alpha.raw(), row);
            closed_ok &= closed_y == stepped_y && closed_0 == stepped_0;

            // Orbit of (y₂, …, y_d) under the (d−1)-dimensional skew with base y₁.
            let sub = skew_from_row(&tail, base, &row[..d]);
            let diff = closed_y.sub(&closed_0)?;
            decomposition_ok &= diff.raw()[0] == base && diff.raw()[1..] == *sub.raw();

            if sub.norm() >= delta {
                f1.push(n);
            }
            let small = sub
                .raw()
                .iter()
                .all(|&c| magnitude_raw(c, prec).checked_mul((d - 1) as u128).is_some_and(|m| m < delta_raw));
            if small {
                f2.push(n);
            }
            skew_step_in_place(&mut stepped_y, alpha.raw());
            skew_step_in_place(&mut stepped_0, alpha.raw());
            rows.advance();
        }
        let f1 = WindowSet::new(window, f1)?;
        let f2 = WindowSet::new(window, f2)?;
        let f3 = f1.complement();
        f2_in_f3 &= f2.is_subset(&f3);
        f1_f2_disjoint &= f1.intersection(&f2).is_empty();
        partition &= f1.intersection(&f3).is_empty() && f1.len() + f3.len() == window as usize;
        f1_sizes.push(f1.len());
        f2_sizes.push(f2.len());
    }
    out.record_json("f1_sizes", &f1_sizes);
    out.record_json("f2_sizes", &f2_sizes);
    out.check("closed_form_matches_stepping", closed_ok);
    out.check("orbit_decomposition", decomposition_ok);
    out.check("f2_subset_f3", f2_in_f3);
    out.check("f1_f2_disjoint", f1_f2_disjoint);
    out.check("f1_f3_partition", partition);
    Ok(())
}
