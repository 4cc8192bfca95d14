use super::{Findings, ParamReader};
use crate::analysis::{divergence_profile, Budget, Dynamics, MorseShift, SignedWindow};
use crate::dyadic::{Dyadic, MetricValue};
use crate::error::{Error, Result};
use crate::families::{longest_block, FamilyWitness, WindowSet};
use crate::systems::symbolic::{symbolic_eval, SymbolicPoint, DEFAULT_RULE_DEPTH};

pub(super) fn strong_ft(p: &mut ParamReader, _seed: u64, out: &mut Findings) -> Result<()> {
    let s = p.u64("s")?;
    let window = p.positive("window")?;
    let back = p.u64("back")?;
    if s >= window {
        return Err(Error::usage("parameter s must be below window"));
    }
    if s > 1024 || back > 1024 {
        return Err(Error::usage("parameters s and back are limited to 1024"));
    }
    let budget = Budget::default();
    let radius = s.max(back).max(1) as u32;
    let sys = MorseShift::new(radius);
    let omega_bar = SymbolicPoint::MorseOmega.flip();
    let eta = SymbolicPoint::Eta;
    let half = Dyadic::pow2_neg(1);
    out.record("system", sys.label());
    out.record("x", &omega_bar);
    out.record("y", &eta);

    let forward = divergence_profile(&sys, &omega_bar, &eta, half, SignedWindow::forward(window + 1), &budget)?;
    out.add_ambiguity(forward.ambiguity_count);
    let separated = forward.distances.iter().all(|d| *d == MetricValue::Exact(Dyadic::ONE));
    out.record("forward_separation", format!("Exact 1 on [0,{window}]: {separated}"));
    out.check("forward_separation", separated);

    let mut backward_ok = true;
    for m in 1..=back {
        let a = sys.iterate(&omega_bar, -(m as i64))?;
        let b = sys.iterate(&eta, -(m as i64))?;
        backward_ok &= sys.distance(&a, &b)? == MetricValue::Exact(Dyadic::pow2_neg(m as u32));
    }
    out.record("backward_asymptotic", format!("Exact 2^-m for m in [1,{back}]: {backward_ok}"));
    out.check("backward_asymptotic", backward_ok);

    let x = omega_bar.shifted(-(s as i64))?;
    let y = eta.shifted(-(s as i64))?;
    out.record("shifted_x", &x);
    out.record("shifted_y", &y);
    let profile = divergence_profile(&sys, &x, &y, half, SignedWindow::forward(window), &budget)?;
    out.add_ambiguity(profile.ambiguity_count);
    let expected_distance = |m: u64| {
        if m < s {
            MetricValue::Exact(Dyadic::pow2_neg((s - m) as u32))
        } else {
            MetricValue::Exact(Dyadic::ONE)
        }
    };
    let distances_ok = profile
        .distances
        .iter()
        .enumerate()
        .all(|(m, d)| *d == expected_distance(m as u64));
    out.check("shifted_distances", distances_ok);

    let expected = WindowSet::new(window, (s..window).collect())?;
    out.record("divergence_set", &profile.exceeds);
    out.check("divergence_set_is_tail", profile.exceeds == expected);

    let block = longest_block(&profile.exceeds).map(|(start, length)| FamilyWitness::Block { start, length });
    match &block {
        Some(w) => out.record_json("block_witness", w),
        None => out.record("block_witness", "none"),
    }
    let length = match &block {
        Some(FamilyWitness::Block { length, .. }) => *length,
        _ => 0,
    };
    out.record("block_length", length);
    out.check("block_length", length == window - s);

    // Independent check: coordinate 0 of the n-th iterate is the n-th symbol,
    // and the distance exceeds 1/2 exactly when that symbol differs.
    let mut direct = Vec::new();
    for n in 0..window as i64 {
        if symbolic_eval(&x, n, DEFAULT_RULE_DEPTH)? != symbolic_eval(&y, n, DEFAULT_RULE_DEPTH)? {
            direct.push(n as u64);
        }
    }
    let direct = WindowSet::new(window, direct)?;
    let validated = block.as_ref().is_some_and(|w| w.validate(&direct)) && direct == profile.exceeds;
    out.check("block_revalidated", validated);
    Ok(())
}
