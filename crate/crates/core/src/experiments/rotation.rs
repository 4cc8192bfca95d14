use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Findings, ParamReader};
use crate::analysis::{pigeonhole_recurrence, sensitivity_set, Budget, Dynamics, NeighborhoodSpec, Rotation};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::systems::circle::{circle_metric, rotation_iterate, CircleCoord};

const TIME_RANGE: i64 = 1_000_000_000;

pub(super) fn equicontinuous(p: &mut ParamReader, seed: u64, out: &mut Findings) -> Result<()> {
    let prec = p.precision()?;
    let alpha = p.circle("alpha", prec)?;
    let eps = p.dyadic("eps", prec.bits())?;
    let grid = p.positive("grid")? as usize;
    let radius = p.dyadic("radius", prec.bits())?;
    let trials = p.u64("trials")?;
    let window = p.positive("window")?;
    if radius.is_zero() || eps.is_zero() {
        return Err(Error::usage("parameters radius and eps must be positive"));
    }
    let budget = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = Rotation::new(alpha);
    out.record("system", sys.label());

    // diam U <= 2r, and rotations are isometries.
    let center = CircleCoord::from_raw(rng.random::<u128>(), prec);
    let delta = match radius.exponent() {
        0 => return Err(Error::usage("parameter radius must be below 1")),
        e => Dyadic::new(radius.numerator(), e - 1),
    };
    let u = NeighborhoodSpec::ball(center, radius);
    out.record("neighborhood_center", center);
    out.record("sensitivity_delta", delta);
    let sens = sensitivity_set(&sys, &u, delta, window, grid, &budget)?;
    out.record("sensitivity_set", &sens);
    out.check("sensitivity_set_empty", sens.is_empty());

    let mut k = None;
    let mut successes = 0u64;
    let mut verified = 0u64;
    for _ in 0..trials {
        let x0 = CircleCoord::from_raw(rng.random::<u128>(), prec);
        let needed = match k {
            Some(k) => k,
            None => pigeonhole_recurrence(alpha, x0, eps, &[])?.k,
        };
        k = Some(needed);
        let count = usize::try_from(needed + 1).map_err(|_| Error::usage("covering count too large"))?;
        let mut s: Vec<i64> = Vec::with_capacity(count);
        while s.len() < count {
            let t = rng.random_range(-TIME_RANGE..=TIME_RANGE);
            if !s.contains(&t) {
                s.push(t);
            }
        }
        let result = pigeonhole_recurrence(alpha, x0, eps, &s)?;
        if let Some((su, sv)) = result.pair {
            successes += 1;
            // Recomputed from the inputs alone.
            let landing = rotation_iterate(x0, alpha, su - sv);
            if su > sv && s.contains(&su) && s.contains(&sv) && circle_metric(x0, landing)? < eps {
                verified += 1;
            }
        }
    }
    if let Some(k) = k {
        out.record("covering_count", k);
    }
    out.record("pigeonhole_success", format!("{successes}/{trials}"));
    out.record("pigeonhole_verified", format!("{verified}/{trials}"));
    out.check("pigeonhole_all_succeed", successes == trials && verified == trials);
    Ok(())
}
