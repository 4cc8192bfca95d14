use serde::Serialize;

use super::{Budget, Dynamics, NeighborhoodSpec};
use crate::dyadic::{Dyadic, Exceedance, MetricValue};
use crate::error::{Error, Result};
use crate::families::WindowSet;

/// `N(x, U) ∩ [0, N)`: the times `n` with `Tⁿx ∈ U`.
pub fn return_times<S: Dynamics>(
    system: &S,
    x: &S::Point,
    u: &NeighborhoodSpec<S::Point>,
    window: u64,
    budget: &Budget,
) -> Result<WindowSet> {
    Error::check_limit("orbit window", window, budget.orbit_steps)?;
    let mut p = x.clone();
    let mut hits = Vec::new();
    for n in 0..window {
        if system.contains(u, &p)? {
            hits.push(n);
        }
        system.step(&mut p)?;
    }
    WindowSet::new(window, hits)
}

/// Sound under-approximation of `N(U, V) ∩ [0, N)`: times at which some
/// sample point of `U` lands in `V`.
pub fn hitting_times<S: Dynamics>(
    system: &S,
    u: &NeighborhoodSpec<S::Point>,
    v: &NeighborhoodSpec<S::Point>,
    window: u64,
    grid: usize,
    budget: &Budget,
) -> Result<WindowSet> {
    Error::check_limit("orbit window", window, budget.orbit_steps)?;
    let mut points = system.samples(u, grid, budget)?;
    Error::check_limit(
        "sample-steps",
        window.saturating_mul(points.len() as u64),
        budget.search_checks,
    )?;
    let mut hits = Vec::new();
    for n in 0..window {
        let mut hit = false;
        for p in points.iter_mut() {
            if !hit && system.contains(v, p)? {
                hit = true;
            }
            system.step(p)?;
        }
        if hit {
            hits.push(n);
        }
    }
    WindowSet::new(window, hits)
}

/// A window `[−back, fwd)` of signed times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignedWindow {
    pub back: u64,
    pub fwd: u64,
}

impl SignedWindow {
    pub fn forward(n: u64) -> Self {
        SignedWindow { back: 0, fwd: n }
    }

    pub fn len(&self) -> u64 {
        self.back + self.fwd
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> i64 {
        -(self.back as i64)
    }
}

/// Distances `d(Tⁿx, Tⁿy)` over a signed window, split by a threshold.
///
/// Index `k` of every set and of `distances` stands for time
/// `n = window.start() + k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivergenceProfile {
    pub window: SignedWindow,
    pub delta: Dyadic,
    pub distances: Vec<MetricValue>,
    /// Times whose recorded distance certifies `> δ`.
    pub exceeds: WindowSet,
    /// Times whose recorded distance certifies `<= δ`.
    pub within: WindowSet,
    /// Times whose recorded upper bound straddles `δ`.
    pub ambiguous: WindowSet,
    pub ambiguity_count: u64,
}

pub fn divergence_profile<S: Dynamics>(
    system: &S,
    x: &S::Point,
    y: &S::Point,
    delta: Dyadic,
    window: SignedWindow,
    budget: &Budget,
) -> Result<DivergenceProfile> {
    let len = window.len();
    Error::check_limit("orbit window", len, budget.orbit_steps)?;
    let mut px = system.iterate(x, window.start())?;
    let mut py = system.iterate(y, window.start())?;
    let mut distances = Vec::with_capacity(len as usize);
    let (mut exceeds, mut within, mut ambiguous) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..len {
        let d = system.distance(&px, &py)?;
        match d.compare_threshold(delta) {
            Exceedance::Exceeds => exceeds.push(k),
            Exceedance::Within => within.push(k),
            Exceedance::Ambiguous => ambiguous.push(k),
        }
        distances.push(d);
        system.step(&mut px)?;
        system.step(&mut py)?;
    }
    Ok(DivergenceProfile {
        window,
        delta,
        distances,
        exceeds: WindowSet::new(len, exceeds)?,
        within: WindowSet::new(len, within)?,
        ambiguity_count: ambiguous.len() as u64,
        ambiguous: WindowSet::new(len, ambiguous)?,
    })
}

/// Sound under-approximation of `N(δ, U) ∩ [0, N)`: times at which two
/// sample points of `U` are certified more than `δ` apart.
pub fn sensitivity_set<S: Dynamics>(
    system: &S,
    u: &NeighborhoodSpec<S::Point>,
    delta: Dyadic,
    window: u64,
    grid: usize,
    budget: &Budget,
) -> Result<WindowSet> {
    if delta.is_zero() {
        return Err(Error::usage("sensitivity threshold must be positive"));
    }
    Error::check_limit("orbit window", window, budget.orbit_steps)?;
    let mut points = system.samples(u, grid, budget)?;
    let mut hits = Vec::new();
    for n in 0..window {
        if sample_diameter_exceeds(system, &points, delta)? {
            hits.push(n);
        }
        for p in points.iter_mut() {
            system.step(p)?;
        }
    }
    WindowSet::new(window, hits)
}

fn sample_diameter_exceeds<S: Dynamics>(system: &S, points: &[S::Point], delta: Dyadic) -> Result<bool> {
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if system.distance(a, b)?.compare_threshold(delta) == Exceedance::Exceeds {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProximalityMin {
    pub value: MetricValue,
    pub argmin: u64,
}

/// Smallest recorded `d(T^{±n}x, T^{±n}y)` over `n ∈ [0, N]`; upper bounds
/// rank below exact values since the true distance may be smaller.
pub fn proximality_inf<S: Dynamics>(
    system: &S,
    x: &S::Point,
    y: &S::Point,
    window: u64,
    direction: Direction,
    budget: &Budget,
) -> Result<ProximalityMin> {
    Error::check_limit("orbit window", window.saturating_add(1), budget.orbit_steps)?;
    let (mut px, mut py) = (x.clone(), y.clone());
    let mut best = ProximalityMin {
        value: system.distance(&px, &py)?,
        argmin: 0,
    };
    for n in 1..=window {
        match direction {
            Direction::Forward => {
                system.step(&mut px)?;
                system.step(&mut py)?;
            }
            Direction::Backward => {
                system.unstep(&mut px)?;
                system.unstep(&mut py)?;
            }
        }
        let d = system.distance(&px, &py)?;
        if d.possibly_smaller_than(&best.value) {
            best = ProximalityMin { value: d, argmin: n };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{MorseShift, Rotation, SkewProduct};
    use crate::families::max_block_length;
    use crate::systems::{CircleCoord, Precision, SymbolicPoint, TorusPoint};

    const P: Precision = Precision::W64;

    fn half_rotation() -> Rotation {
        Rotation::new(CircleCoord::from_raw(1 << 63, P))
    }

    fn c(x: &str) -> CircleCoord {
        CircleCoord::parse(x, P).unwrap()
    }

    #[test]
    fn return_times_period_two() {
        let u = NeighborhoodSpec::ball(c("0"), Dyadic::pow2_neg(3));
        let r = return_times(&half_rotation(), &c("0"), &u, 11, &Budget::default()).unwrap();
        assert_eq!(r.to_string(), "0,2,4,6,8,10@11");
        let everything = NeighborhoodSpec::ball(c("0"), Dyadic::ONE);
        let r = return_times(&half_rotation(), &c("0.3"), &everything, 7, &Budget::default()).unwrap();
        assert_eq!(r, WindowSet::full(7));
    }

    #[test]
    fn return_times_budget() {
        let u = NeighborhoodSpec::ball(c("0"), Dyadic::pow2_neg(3));
        let b = Budget { orbit_steps: 5, ..Budget::default() };
        assert!(matches!(return_times(&half_rotation(), &c("0"), &u, 6, &b), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn skew_returns_to_small_ball() {
        let sys = SkewProduct::new(CircleCoord::sqrt2_minus_1(P), 2).unwrap();
        let x = TorusPoint::zero(2, P);
        let u = NeighborhoodSpec::ball(x.clone(), Dyadic::pow2_neg(6));
        let r = return_times(&sys, &x, &u, 10_000, &Budget::default()).unwrap();
        assert!(r.contains(0));
        assert!(r.len() > 1);
        // Each reported time really returns.
        for &n in r.elements() {
            let p = sys.iterate(&x, n as i64).unwrap();
            assert!(sys.distance(&x, &p).unwrap().upper() < Dyadic::pow2_neg(6));
        }
    }

    #[test]
    fn hitting_times_examples() {
        let sys = half_rotation();
        let u = NeighborhoodSpec::ball(c("0"), Dyadic::pow2_neg(3));
        let same = hitting_times(&sys, &u, &u, 6, 4, &Budget::default()).unwrap();
        assert!(same.contains(0));
        let v = NeighborhoodSpec::ball(c("0.5"), Dyadic::pow2_neg(3));
        let odd = hitting_times(&sys, &u, &v, 9, 4, &Budget::default()).unwrap();
        assert_eq!(odd.to_string(), "1,3,5,7@9");
    }

    #[test]
    fn hitting_times_contain_center_returns() {
        let sys = SkewProduct::new(CircleCoord::sqrt2_minus_1(P), 2).unwrap();
        let x = TorusPoint::zero(2, P);
        let u = NeighborhoodSpec::ball(x.clone(), Dyadic::pow2_neg(6));
        let h = hitting_times(&sys, &u, &u, 10_000, 3, &Budget::default()).unwrap();
        let r = return_times(&sys, &x, &u, 10_000, &Budget::default()).unwrap();
        assert!(r.is_subset(&h));
    }

    #[test]
    fn divergence_examples() {
        let sys = half_rotation();
        let d = divergence_profile(&sys, &c("0"), &c("0"), Dyadic::pow2_neg(3), SignedWindow::forward(20), &Budget::default()).unwrap();
        assert!(d.exceeds.is_empty());
        assert_eq!(d.within, WindowSet::full(20));

        let rot = Rotation::new(CircleCoord::sqrt2_minus_1(P));
        let (x, y) = (c("0.1"), c("0.4"));
        let far = divergence_profile(&rot, &x, &y, Dyadic::pow2_neg(2), SignedWindow::forward(50), &Budget::default()).unwrap();
        assert_eq!(far.exceeds, WindowSet::full(50));
        let near = divergence_profile(&rot, &x, &y, Dyadic::pow2_neg(1), SignedWindow::forward(50), &Budget::default()).unwrap();
        assert!(near.exceeds.is_empty());
    }

    #[test]
    fn morse_pair_diverges_forward() {
        let sys = MorseShift::new(32);
        let wb = SymbolicPoint::MorseOmega.flip();
        let eta = SymbolicPoint::Eta;
        let d = divergence_profile(&sys, &wb, &eta, Dyadic::pow2_neg(1), SignedWindow::forward(300), &Budget::default()).unwrap();
        assert_eq!(d.exceeds, WindowSet::full(300));
        assert!(d.distances.iter().all(|v| *v == MetricValue::Exact(Dyadic::ONE)));
        assert_eq!(d.ambiguity_count, 0);
    }

    #[test]
    fn signed_window_reindexes() {
        let sys = MorseShift::new(8);
        let wb = SymbolicPoint::MorseOmega.flip();
        let eta = SymbolicPoint::Eta;
        let w = SignedWindow { back: 20, fwd: 10 };
        let d = divergence_profile(&sys, &wb, &eta, Dyadic::pow2_neg(1), w, &Budget::default()).unwrap();
        // Times 0..10 map to indices 20..30.
        assert_eq!(d.exceeds.elements(), (20..30).collect::<Vec<_>>().as_slice());
        // Backward times beyond the scan radius are only bounded.
        assert_eq!(d.ambiguity_count, 0);
        assert_eq!(d.distances[0], MetricValue::AtMost(Dyadic::pow2_neg(9)));
        assert_eq!(d.exceeds.len() + d.within.len() + d.ambiguous.len(), 30);
    }

    #[test]
    fn ambiguity_is_counted() {
        let sys = MorseShift::new(0);
        let p = SymbolicPoint::MorseOmega;
        let d = divergence_profile(&sys, &p, &p, Dyadic::pow2_neg(3), SignedWindow::forward(5), &Budget::default()).unwrap();
        // AtMost(1/2) cannot be compared with 1/8.
        assert_eq!(d.ambiguity_count, 5);
        assert!(d.exceeds.is_empty() && d.within.is_empty());
    }

    #[test]
    fn rotation_is_not_sensitive() {
        let rot = Rotation::new(CircleCoord::sqrt2_minus_1(P));
        let u = NeighborhoodSpec::ball(c("0.3"), Dyadic::pow2_neg(6));
        let s = sensitivity_set(&rot, &u, Dyadic::pow2_neg(5), 2000, 16, &Budget::default()).unwrap();
        assert!(s.is_empty());
        let s = sensitivity_set(&rot, &u, Dyadic::pow2_neg(8), 2000, 16, &Budget::default()).unwrap();
        assert_eq!(s, WindowSet::full(2000));
        assert!(sensitivity_set(&rot, &u, Dyadic::ZERO, 10, 4, &Budget::default()).is_err());
    }

    #[test]
    fn skew_sensitivity_nonempty() {
        let sys = SkewProduct::new(CircleCoord::sqrt2_minus_1(P), 2).unwrap();
        let (radius, _) = Dyadic::from_decimal("0.01", 64).unwrap();
        let u = NeighborhoodSpec::ball(TorusPoint::zero(2, P), radius);
        let s = sensitivity_set(&sys, &u, Dyadic::pow2_neg(2), 20_000, 4, &Budget::default()).unwrap();
        assert!(!s.is_empty());
        assert!(max_block_length(&s) > 1);
    }

    #[test]
    fn more_samples_never_remove_times() {
        let sys = SkewProduct::new(CircleCoord::sqrt2_minus_1(P), 2).unwrap();
        let u = NeighborhoodSpec::ball(TorusPoint::zero(2, P), Dyadic::pow2_neg(5));
        let coarse = sensitivity_set(&sys, &u, Dyadic::pow2_neg(2), 3000, 2, &Budget::default()).unwrap();
        let fine = sensitivity_set(&sys, &u, Dyadic::pow2_neg(2), 3000, 6, &Budget::default()).unwrap();
        // The grid-6 lattice contains the grid-2 lattice.
        assert!(coarse.is_subset(&fine));
    }

    #[test]
    fn proximality_examples() {
        let rot = Rotation::new(CircleCoord::sqrt2_minus_1(P));
        let m = proximality_inf(&rot, &c("0.2"), &c("0.2"), 10, Direction::Forward, &Budget::default()).unwrap();
        assert_eq!(m.value, MetricValue::Exact(Dyadic::ZERO));
        let m = proximality_inf(&rot, &c("0"), &c("0.25"), 100, Direction::Forward, &Budget::default()).unwrap();
        assert_eq!(m, ProximalityMin { value: MetricValue::Exact(Dyadic::pow2_neg(2)), argmin: 0 });

        let sys = MorseShift::new(64);
        let m = proximality_inf(&sys, &SymbolicPoint::MorseOmega.flip(), &SymbolicPoint::Eta, 40, Direction::Backward, &Budget::default()).unwrap();
        assert_eq!(m, ProximalityMin { value: MetricValue::Exact(Dyadic::pow2_neg(40)), argmin: 40 });
    }
}
