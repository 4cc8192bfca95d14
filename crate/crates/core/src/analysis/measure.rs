use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{Budget, Dynamics, NeighborhoodSpec, Rotation, SearchStatus, SkewProduct};
use crate::error::{Error, Result};
use crate::families::{fs_closure, FamilyCaps, GeneratorSeq};
use crate::systems::circle::{CircleCoord, Precision};
use crate::systems::torus::TorusPoint;

/// Largest number of `k`-subsets searched exhaustively.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;
/// Beam width of the greedy fallback.
pub const BEAM_WIDTH: usize = 64;

/// A finite probability space of cells with integer weights over a common
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpace {
    weights: Vec<u64>,
    total: u64,
}

impl CellSpace {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        let total = weights
            .iter()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or_else(|| Error::usage("cell weights overflow"))?;
        if total == 0 {
            return Err(Error::usage("cell space has zero total weight"));
        }
        Ok(CellSpace { weights, total })
    }

    /// `m` cells of measure `1/m` each.
    pub fn uniform(m: usize) -> Result<Self> {
        CellSpace::new(vec![1; m])
    }

    pub fn cells(&self) -> usize {
        self.weights.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    pub fn set(&self, cells: &[usize]) -> Result<CellSet> {
        let mut bits = vec![0u64; self.cells().div_ceil(64)];
        for &c in cells {
            if c >= self.cells() {
                return Err(Error::usage(format!("cell {c} outside a space of {} cells", self.cells())));
            }
            bits[c / 64] |= 1 << (c % 64);
        }
        Ok(CellSet { bits })
    }

    pub fn full_set(&self) -> CellSet {
        self.set(&(0..self.cells()).collect::<Vec<_>>()).expect("cells in range")
    }

    fn weight_of(&self, set: &CellSet) -> u64 {
        set.cells().map(|c| self.weights[c]).sum()
    }

    pub fn measure(&self, set: &CellSet) -> BigRational {
        ratio(self.weight_of(set), self.total)
    }
}

/// A set of cells as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellSet {
    bits: Vec<u64>,
}

impl CellSet {
    pub fn intersection(&self, other: &CellSet) -> CellSet {
        CellSet {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.bits.get(cell / 64).is_some_and(|w| w & (1 << (cell % 64)) != 0)
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| i * 64 + b))
    }
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionStrategy {
    Exhaustive,
    GreedyBeam,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GillisOutcome {
    pub strategy: SelectionStrategy,
    pub status: SearchStatus,
    /// Indices `t₁ < … < t_k` into the input sets.
    pub indices: Option<Vec<usize>>,
    pub measure: Option<BigRational>,
    /// `a^k − ε`.
    pub threshold: BigRational,
    pub candidates_checked: u64,
}

fn binomial_saturating(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Finds `k` of the sets whose common intersection has measure at least
/// `a^k − ε`, exhaustively (lexicographically first) when the number of
/// `k`-subsets is at most [`EXHAUSTIVE_LIMIT`], else by a greedy beam.
pub fn gillis_select(
    space: &CellSpace,
    sets: &[CellSet],
    a: &BigRational,
    k: usize,
    eps: &BigRational,
) -> Result<GillisOutcome> {
    if k == 0 || k > sets.len() {
        return Err(Error::usage(format!("need 1 <= k <= {}, got k = {k}", sets.len())));
    }
    if eps.is_negative() {
        return Err(Error::usage("ε must be nonnegative"));
    }
    let words = space.cells().div_ceil(64);
    for (i, e) in sets.iter().enumerate() {
        if e.bits.len() != words {
            return Err(Error::usage(format!("set {i} belongs to a different cell space")));
        }
        if &space.measure(e) < a {
            return Err(Error::usage(format!("set {i} has measure {} below a = {a}", space.measure(e))));
        }
    }
    let threshold = num_traits::pow(a.clone(), k) - eps;
    // Smallest integer weight w with w / total >= threshold.
    let scaled = &threshold * BigRational::from_integer(BigInt::from(space.total_weight()));
    let need = if scaled.is_positive() {
        scaled.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    } else {
        0
    };

    let combos = binomial_saturating(sets.len() as u128, k as u128);
    let (strategy, found, checked) = if combos <= EXHAUSTIVE_LIMIT {
        let mut search = Exhaustive { space, sets, k, need, checked: 0, chosen: Vec::with_capacity(k) };
        let found = search.run(0, &space.full_set());
        (SelectionStrategy::Exhaustive, found, search.checked)
    } else {
        let (found, checked) = beam(space, sets, k, need);
        (SelectionStrategy::GreedyBeam, found, checked)
    };

    let status = match (&found, strategy) {
        (Some(_), _) => SearchStatus::Found,
        (None, SelectionStrategy::Exhaustive) => SearchStatus::AbsentExhaustive,
        (None, SelectionStrategy::GreedyBeam) => SearchStatus::AbsentBudget,
    };
    let measure = match &found {
        Some(idx) => {
            let mut inter = space.full_set();
            for &i in idx {
                inter = inter.intersection(&sets[i]);
            }
            let m = space.measure(&inter);
            if m < threshold {
                return Err(Error::Internal(format!("selected sets {idx:?} have measure {m} below {threshold}")));
            }
            Some(m)
        }
        None => None,
    };
    Ok(GillisOutcome {
        strategy,
        status,
        indices: found,
        measure,
        threshold,
        candidates_checked: checked,
    })
}

struct Exhaustive<'a> {
    space: &'a CellSpace,
    sets: &'a [CellSet],
    k: usize,
    need: u64,
    checked: u64,
    chosen: Vec<usize>,
}

impl Exhaustive<'_> {
    fn run(&mut self, from: usize, inter: &CellSet) -> Option<Vec<usize>> {
        let remaining = self.k - self.chosen.len();
        for i in from..=self.sets.len() - remaining {
            self.checked += 1;
            let next = inter.intersection(&self.sets[i]);
            // Intersections only shrink.
            if self.space.weight_of(&next) < self.need {
                continue;
            }
            self.chosen.push(i);
            if remaining == 1 {
                return Some(self.chosen.clone());
            }
            if let Some(found) = self.run(i + 1, &next) {
                return Some(found);
            }
            self.chosen.pop();
        }
        None
    }
}

fn beam(space: &CellSpace, sets: &[CellSet], k: usize, need: u64) -> (Option<Vec<usize>>, u64) {
    let mut checked = 0u64;
    let mut frontier: Vec<(Vec<usize>, CellSet, u64)> = vec![(Vec::new(), space.full_set(), space.total_weight())];
    for _ in 0..k {
        let mut next = Vec::new();
        for (chosen, inter, _) in &frontier {
            let from = chosen.last().map_or(0, |&l| l + 1);
            for (i, e) in sets.iter().enumerate().skip(from) {
                checked += 1;
                let cut = inter.intersection(e);
                let w = space.weight_of(&cut);
                if w >= need {
                    let mut c = chosen.clone();
                    c.push(i);
                    next.push((c, cut, w));
                }
            }
        }
        next.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
        next.truncate(BEAM_WIDTH);
        if next.is_empty() {
            return (None, checked);
        }
        frontier = next;
    }
    (frontier.into_iter().next().map(|(c, _, _)| c), checked)
}

/// Systems whose phase space carries a uniform cell grid.
pub trait CellGrid: Dynamics {
    /// Number of cells at `resolution` cells per dimension.
    fn cell_count(&self, resolution: u64) -> Result<u64>;

    /// Midpoint of cell `index`.
    fn cell_center(&self, index: u64, resolution: u64) -> Result<Self::Point>;
}

/// `floor((2i + 1)·2^W / 2m)`: the midpoint of the `i`-th of `m` arcs.
fn arc_midpoint(i: u64, m: u64, prec: Precision) -> u128 {
    let num = BigUint::from(2 * i + 1) << prec.bits();
    let v = num / BigUint::from(2 * m);
    v.to_u128().expect("midpoint below 2^W") & prec.mask()
}

fn check_resolution(resolution: u64) -> Result<()> {
    if resolution == 0 {
        return Err(Error::usage("grid resolution must be positive"));
    }
    Ok(())
}

impl CellGrid for Rotation {
    fn cell_count(&self, resolution: u64) -> Result<u64> {
        check_resolution(resolution)?;
        Ok(resolution)
    }

    fn cell_center(&self, index: u64, resolution: u64) -> Result<CircleCoord> {
        let prec = self.alpha.precision();
        Ok(CircleCoord::from_raw(arc_midpoint(index, resolution, prec), prec))
    }
}

impl CellGrid for SkewProduct {
    fn cell_count(&self, resolution: u64) -> Result<u64> {
        check_resolution(resolution)?;
        resolution
            .checked_pow(self.dim as u32)
            .ok_or_else(|| Error::usage(format!("{resolution}^{} cells overflow", self.dim)))
    }

    fn cell_center(&self, mut index: u64, resolution: u64) -> Result<TorusPoint> {
        let prec = self.alpha.precision();
        let mut raw = vec![0u128; self.dim];
        for slot in raw.iter_mut() {
            *slot = arc_midpoint(index % resolution, resolution, prec);
            index /= resolution;
        }
        TorusPoint::from_raw(raw, prec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpOverlapOutcome {
    pub q: Option<u64>,
    /// Estimated `μ(U ∩ T^{−q}U)` for the returned `q`.
    pub overlap: Option<BigRational>,
    /// Estimated `μ(U)`.
    pub mu_u: BigRational,
    pub threshold: BigRational,
    pub cells: u64,
    pub candidates_checked: usize,
}

/// Scans `q` over the finite sums of `gens` in increasing order and returns
/// the first whose grid estimate of `μ(U ∩ T^{−q}U)` meets the threshold,
/// by default `½·μ̂(U)²`. Estimates count cells by their midpoints.
pub fn ip_overlap_search<S: CellGrid>(
    system: &S,
    u: &NeighborhoodSpec<S::Point>,
    gens: &GeneratorSeq,
    threshold: Option<BigRational>,
    resolution: u64,
    budget: &Budget,
) -> Result<IpOverlapOutcome> {
    let cells = system.cell_count(resolution)?;
    Error::check_limit("grid cells", cells, budget.samples.saturating_mul(64))?;
    let sums = fs_closure(gens, FamilyCaps::default().fs_generators)?;
    let mut inside = Vec::new();
    for i in 0..cells {
        let c = system.cell_center(i, resolution)?;
        if system.contains(u, &c)? {
            inside.push(c);
        }
    }
    if inside.is_empty() {
        return Err(Error::usage("the grid is too coarse to give the neighborhood positive measure"));
    }
    Error::check_limit(
        "overlap checks",
        (inside.len() as u64).saturating_mul(sums.len() as u64),
        budget.search_checks,
    )?;
    let mu_u = ratio(inside.len() as u64, cells);
    let threshold = threshold.unwrap_or_else(|| &mu_u * &mu_u / BigRational::from_integer(BigInt::from(2)));
    let mut checked = 0;
    for &q in &sums {
        checked += 1;
        let n = i64::try_from(q).map_err(|_| Error::usage(format!("finite sum {q} exceeds the signed time range")))?;
        let mut hits = 0u64;
        for c in &inside {
            if system.contains(u, &system.iterate(c, n)?)? {
                hits += 1;
            }
        }
        let overlap = ratio(hits, cells);
        if overlap >= threshold && !overlap.is_zero() {
            return Ok(IpOverlapOutcome {
                q: Some(q),
                overlap: Some(overlap),
                mu_u,
                threshold,
                cells,
                candidates_checked: checked,
            });
        }
    }
    Ok(IpOverlapOutcome { q: None, overlap: None, mu_u, threshold, cells, candidates_checked: checked })
}
