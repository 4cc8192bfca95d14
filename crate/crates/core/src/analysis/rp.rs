use serde::Serialize;

use super::{Budget, Dynamics, NeighborhoodSpec, SearchStatus};
use crate::dyadic::{Dyadic, MetricValue};
use crate::error::{Error, Result};

pub const MAX_RP_ORDER: usize = 4;

/// Points `x′`, `y′` and times `n₁, …, n_d` with
/// `d(T^{n·ε}x′, T^{n·ε}y′) < δ` for every nonzero `ε ∈ {0,1}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "P: Serialize"))]
pub struct RpWitness<P> {
    pub x_prime: P,
    pub y_prime: P,
    pub times: Vec<i64>,
    /// `(n·ε, distance)` for each nonzero `ε` in binary-counter order.
    pub combos: Vec<(i64, MetricValue)>,
}

impl<P: Clone + PartialEq> RpWitness<P> {
    /// Recomputes every combination from scratch with direct iterates and
    /// checks both base points against their balls.
    pub fn verify<S: Dynamics<Point = P>>(&self, system: &S, x: &P, y: &P, delta: Dyadic) -> Result<bool> {
        let near = |a: &P, b: &P| -> Result<bool> { Ok(system.distance(a, b)?.upper() < delta) };
        if !near(x, &self.x_prime)? || !near(y, &self.y_prime)? {
            return Ok(false);
        }
        if self.times.is_empty() || self.times.contains(&0) {
            return Ok(false);
        }
        for mask in 1u32..(1 << self.times.len()) {
            let s = combo_sum(&self.times, mask);
            let a = system.iterate(&self.x_prime, s)?;
            let b = system.iterate(&self.y_prime, s)?;
            if !near(&a, &b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "P: Serialize"))]
pub struct RpSearchOutcome<P> {
    pub status: SearchStatus,
    pub witness: Option<RpWitness<P>>,
    pub pairs_scanned: u64,
}

fn combo_sum(times: &[i64], mask: u32) -> i64 {
    times
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &n)| n)
        .sum()
}

/// Scans sample points `x′` of `Ball(x, δ)` (outer loop), `y′` of
/// `Ball(y, δ)`, then `n ∈ [−B, B]^d` with no zero entry in lexicographic
/// order, and returns the first witness. Absence only reports the budget.
#[allow(clippy::too_many_arguments)]
pub fn rp_witness_search<S: Dynamics>(
    system: &S,
    x: &S::Point,
    y: &S::Point,
    order: usize,
    delta: Dyadic,
    bound: u32,
    grid: usize,
    budget: &Budget,
) -> Result<RpSearchOutcome<S::Point>> {
    if order == 0 || order > MAX_RP_ORDER {
        return Err(Error::usage(format!("order must be in 1..={MAX_RP_ORDER}, got {order}")));
    }
    if bound == 0 {
        return Err(Error::usage("time bound must be positive"));
    }
    if delta.is_zero() {
        return Err(Error::usage("threshold must be positive"));
    }
    let xs = system.samples(&NeighborhoodSpec::ball(x.clone(), delta), grid, budget)?;
    let ys = system.samples(&NeighborhoodSpec::ball(y.clone(), delta), grid, budget)?;

    let b = bound as i64;
    let span = order as i64 * b;
    let table_len = (2 * span + 1) as u64;
    let per_pair = (2 * b as u64).pow(order as u32);
    let pairs = (xs.len() as u64) * (ys.len() as u64);
    let orbit_points = (xs.len() as u64 + ys.len() as u64).saturating_mul(table_len);
    Error::check_limit("orbit table steps", orbit_points, budget.orbit_steps)?;
    Error::check_limit(
        "rp candidate checks",
        pairs.saturating_mul(table_len.saturating_add(per_pair)),
        budget.search_checks,
    )?;

    let orbit = |p: &S::Point| -> Result<Vec<S::Point>> {
        let mut q = system.iterate(p, -span)?;
        let mut out = Vec::with_capacity(table_len as usize);
        for _ in 0..table_len {
            out.push(q.clone());
            system.step(&mut q)?;
        }
        Ok(out)
    };
    let x_orbits = xs.iter().map(&orbit).collect::<Result<Vec<_>>>()?;
    let y_orbits = ys.iter().map(&orbit).collect::<Result<Vec<_>>>()?;

    let axis: Vec<i64> = (-b..=b).filter(|&n| n != 0).collect();
    let mut scanned = 0u64;
    let mut close = vec![false; table_len as usize];
    let mut distances = vec![MetricValue::Exact(Dyadic::ZERO); table_len as usize];
    for (xi, xo) in x_orbits.iter().enumerate() {
        for (yi, yo) in y_orbits.iter().enumerate() {
            scanned += 1;
            for s in 0..table_len as usize {
                let d = system.distance(&xo[s], &yo[s])?;
                close[s] = d.upper() < delta;
                distances[s] = d;
            }
            let mut idx = vec![0usize; order];
            loop {
                let times: Vec<i64> = idx.iter().map(|&i| axis[i]).collect();
                let ok = (1u32..(1 << order)).all(|mask| close[(combo_sum(&times, mask) + span) as usize]);
                if ok {
                    let combos = (1u32..(1 << order))
                        .map(|mask| {
                            let s = combo_sum(&times, mask);
                            (s, distances[(s + span) as usize])
                        })
                        .collect();
                    let witness = RpWitness {
                        x_prime: xs[xi].clone(),
                        y_prime: ys[yi].clone(),
                        times,
                        combos,
                    };
                    if !witness.verify(system, x, y, delta)? {
                        return Err(Error::Internal(format!(
                            "rp witness failed re-verification for {}",
                            system.label()
                        )));
                    }
                    return Ok(RpSearchOutcome {
                        status: SearchStatus::Found,
                        witness: Some(witness),
                        pairs_scanned: scanned,
                    });
                }
                if !advance(&mut idx, axis.len()) {
                    break;
                }
            }
        }
    }
    Ok(RpSearchOutcome {
        status: SearchStatus::AbsentBudget,
        witness: None,
        pairs_scanned: scanned,
    })
}

fn advance(idx: &mut [usize], radix: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{MorseShift, Rotation, SkewProduct};
    use crate::systems::{CircleCoord, Precision, SymbolicPoint, TorusPoint};

    const P: Precision = Precision::W64;

    fn skew2() -> SkewProduct {
        SkewProduct::new(CircleCoord::sqrt2_minus_1(P), 2).unwrap()
    }

    fn t(s: &str) -> TorusPoint {
        TorusPoint::parse(s, P).unwrap()
    }

    #[test]
    fn identical_points_give_trivial_witness() {
        let sys = skew2();
        let x = t("0.3/0.7");
        let out = rp_witness_search(&sys, &x, &x, 2, Dyadic::pow2_neg(4), 3, 4, &Budget::default()).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
        let w = out.witness.unwrap();
        assert_eq!(w.x_prime, x);
        assert_eq!(w.y_prime, x);
        assert_eq!(w.times, vec![-3, -3]);
        assert_eq!(w.combos.len(), 3);
    }

    #[test]
    fn equal_first_coordinates_are_rp1() {
        let sys = skew2();
        let (x, y) = (t("0.2/0.1"), t("0.2/0.6"));
        let delta = Dyadic::pow2_neg(4);
        let out = rp_witness_search(&sys, &x, &y, 1, delta, 512, 8, &Budget::default()).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
        let w = out.witness.unwrap();
        assert!(w.verify(&sys, &x, &y, delta).unwrap());
        assert!(w.combos.iter().all(|(_, d)| d.upper() < delta));
    }

    #[test]
    fn separated_first_coordinates_absent() {
        let sys = skew2();
        let (x, y) = (t("0/0"), t("0.25/0"));
        let out = rp_witness_search(&sys, &x, &y, 1, Dyadic::pow2_neg(5), 64, 4, &Budget::default()).unwrap();
        assert_eq!(out.status, SearchStatus::AbsentBudget);
        assert!(out.witness.is_none());
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let sys = skew2();
        let (x, y) = (t("0.2/0.1"), t("0.2/0.6"));
        let delta = Dyadic::pow2_neg(4);
        let mut w = rp_witness_search(&sys, &x, &y, 1, delta, 512, 8, &Budget::default())
            .unwrap()
            .witness
            .unwrap();
        let original = w.clone();
        w.y_prime = t("0.7/0.6");
        assert!(!w.verify(&sys, &x, &y, delta).unwrap());
        w = original;
        w.times[0] = 0;
        assert!(!w.verify(&sys, &x, &y, delta).unwrap());
    }

    #[test]
    fn rotation_pairs() {
        let rot = Rotation::new(CircleCoord::sqrt2_minus_1(P));
        let x = CircleCoord::parse("0.1", P).unwrap();
        let y = CircleCoord::parse("0.12", P).unwrap();
        let out = rp_witness_search(&rot, &x, &y, 3, Dyadic::pow2_neg(4), 2, 4, &Budget::default()).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
    }

    #[test]
    fn morse_pair_witness() {
        let sys = MorseShift::new(32);
        let x = SymbolicPoint::MorseOmega;
        let out = rp_witness_search(&sys, &x, &x, 2, Dyadic::pow2_neg(3), 2, 1, &Budget::default()).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
    }

    #[test]
    fn argument_checks() {
        let sys = skew2();
        let x = t("0/0");
        let b = Budget::default();
        assert!(rp_witness_search(&sys, &x, &x, 0, Dyadic::pow2_neg(3), 2, 2, &b).is_err());
        assert!(rp_witness_search(&sys, &x, &x, 5, Dyadic::pow2_neg(3), 2, 2, &b).is_err());
        assert!(rp_witness_search(&sys, &x, &x, 1, Dyadic::ZERO, 2, 2, &b).is_err());
        let tight = Budget { search_checks: 10, ..b };
        assert!(matches!(
            rp_witness_search(&sys, &x, &x, 2, Dyadic::pow2_neg(3), 20, 2, &tight),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
