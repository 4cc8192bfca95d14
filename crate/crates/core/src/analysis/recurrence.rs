use std::collections::HashMap;

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::systems::circle::{circle_metric, rotation_iterate, CircleCoord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PigeonholeOutcome {
    /// Number of arcs of width `ε/2` covering the circle.
    pub k: u128,
    /// `(S_u, S_v)` with `S_u > S_v`, both landing in one arc.
    pub pair: Option<(i64, i64)>,
    /// `x₀ + (S_u − S_v)α`.
    pub landing: Option<CircleCoord>,
    pub distance: Option<Dyadic>,
}

/// Buckets `x₀ + S_i·α` into arcs of width `τ = ε/2` and returns the first
/// pair sharing an arc, so that `S_u − S_v` returns `x₀` into `Ball(x₀, ε)`.
/// A pair is guaranteed once `|S| > k`.
pub fn pigeonhole_recurrence(alpha: CircleCoord, x0: CircleCoord, eps: Dyadic, s: &[i64]) -> Result<PigeonholeOutcome> {
    let prec = x0.precision();
    if alpha.precision() != prec {
        return Err(Error::usage("rotation number and base point use different precisions"));
    }
    if eps.is_zero() {
        return Err(Error::usage("ε must be positive"));
    }
    if eps > Dyadic::ONE {
        return Err(Error::usage("ε must be at most 1"));
    }
    let tau = eps.half();
    let width = tau
        .to_raw(prec.bits())
        .filter(|&w| w > 0)
        .ok_or_else(|| Error::usage(format!("ε/2 = {tau} is not representable at {} bits", prec.bits())))?;
    let k = prec.mask() / width + 1;

    let mut seen: HashMap<u128, i64> = HashMap::with_capacity(s.len());
    let mut pair = None;
    for (i, &si) in s.iter().enumerate() {
        if s[..i].contains(&si) {
            return Err(Error::usage(format!("time {si} appears more than once")));
        }
        if pair.is_some() {
            continue;
        }
        let bucket = rotation_iterate(x0, alpha, si).raw() / width;
        match seen.get(&bucket) {
            Some(&sj) => pair = Some((si.max(sj), si.min(sj))),
            None => {
                seen.insert(bucket, si);
            }
        }
    }
    let Some((su, sv)) = pair else {
        return Ok(PigeonholeOutcome { k, pair: None, landing: None, distance: None });
    };
    let diff = su
        .checked_sub(sv)
        .ok_or_else(|| Error::usage("time difference overflows a 64-bit integer"))?;
    let landing = rotation_iterate(x0, alpha, diff);
    let distance = circle_metric(x0, landing)?;
    if distance >= eps {
        return Err(Error::Internal(format!(
            "pigeonhole pair ({su}, {sv}) lands at distance {distance}, not below {eps}"
        )));
    }
    Ok(PigeonholeOutcome {
        k,
        pair: Some((su, sv)),
        landing: Some(landing),
        distance: Some(distance),
    })
}
