use std::fmt;

use serde::Serialize;

use super::{Budget, NeighborhoodSpec};
use crate::dyadic::{Dyadic, MetricValue};
use crate::error::{Error, Result};
use crate::systems::circle::{rotation_iterate, CircleCoord, Precision};
use crate::systems::symbolic::{symbolic_eval, symbolic_metric, SymbolicPoint};
use crate::systems::torus::{
    raw_torus_distance, skew_iterate_signed, skew_step_in_place, skew_unstep_in_place, TorusPoint,
};

/// An invertible system with exact distances, as seen by the analytics.
pub trait Dynamics: Sync {
    type Point: Clone + PartialEq + fmt::Display + Serialize + Send + Sync;

    fn label(&self) -> String;

    /// Forward step in place.
    fn step(&self, p: &mut Self::Point) -> Result<()>;

    /// Inverse step in place.
    fn unstep(&self, p: &mut Self::Point) -> Result<()>;

    /// `Tⁿp` for signed `n`, computed directly rather than by stepping.
    fn iterate(&self, p: &Self::Point, n: i64) -> Result<Self::Point>;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Result<MetricValue>;

    fn contains(&self, u: &NeighborhoodSpec<Self::Point>, p: &Self::Point) -> Result<bool>;

    /// Deterministic sample points of `u`, every one of which lies in `u`.
    /// Balls yield their center followed by a `grid`-per-dimension lattice.
    fn samples(&self, u: &NeighborhoodSpec<Self::Point>, grid: usize, budget: &Budget) -> Result<Vec<Self::Point>>;
}

/// `grid` offsets spread evenly inside `(−r, r)`, as wrapping raw values;
/// the whole circle when `r > 1/2`.
fn lattice_offsets(radius: Dyadic, grid: usize, prec: Precision) -> Result<Vec<u128>> {
    if grid == 0 {
        return Err(Error::usage("grid resolution must be positive"));
    }
    let g = grid as u128;
    if radius > Dyadic::pow2_neg(1) {
        // Evenly spaced around the whole circle.
        let step = (prec.mask() / g).wrapping_add(1);
        return Ok((0..g).map(|i| i.wrapping_mul(step) & prec.mask()).collect());
    }
    let r = prec.raw_of(radius)?;
    let (q, rem) = (r / g, r % g);
    Ok((0..g)
        .map(|i| {
            let k = 2 * i + 1;
            let pos = k * q + k * rem / g;
            pos.wrapping_sub(r) & prec.mask()
        })
        .collect())
}

fn dedup_in_order<P: PartialEq>(points: Vec<P>) -> Vec<P> {
    let mut out: Vec<P> = Vec::with_capacity(points.len());
    for p in points {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn cylinder_unsupported(system: &str) -> Error {
    Error::Unsupported(format!("cylinder neighborhoods are not defined for {system}"))
}

/// `x ↦ x + α` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rotation {
    pub alpha: CircleCoord,
}

impl Rotation {
    pub fn new(alpha: CircleCoord) -> Self {
        Rotation { alpha }
    }
}

impl Dynamics for Rotation {
    type Point = CircleCoord;

    fn label(&self) -> String {
        format!("rotation:{}", self.alpha)
    }

    fn step(&self, p: &mut CircleCoord) -> Result<()> {
        *p = p.wrapping_add(self.alpha);
        Ok(())
    }

    fn unstep(&self, p: &mut CircleCoord) -> Result<()> {
        *p = p.wrapping_sub(self.alpha);
        Ok(())
    }

    fn iterate(&self, p: &CircleCoord, n: i64) -> Result<CircleCoord> {
        Ok(rotation_iterate(*p, self.alpha, n))
    }

    fn distance(&self, a: &CircleCoord, b: &CircleCoord) -> Result<MetricValue> {
        Ok(MetricValue::Exact(crate::systems::circle_metric(*a, *b)?))
    }

    fn contains(&self, u: &NeighborhoodSpec<CircleCoord>, p: &CircleCoord) -> Result<bool> {
        match u {
            NeighborhoodSpec::Ball { center, radius } => Ok(crate::systems::circle_metric(*center, *p)? < *radius),
            NeighborhoodSpec::Cylinder { .. } => Err(cylinder_unsupported("rotations")),
        }
    }

    fn samples(&self, u: &NeighborhoodSpec<CircleCoord>, grid: usize, budget: &Budget) -> Result<Vec<CircleCoord>> {
        let NeighborhoodSpec::Ball { center, radius } = u else {
            return Err(cylinder_unsupported("rotations"));
        };
        Error::check_limit("neighborhood samples", grid as u64 + 1, budget.samples)?;
        let prec = center.precision();
        let mut out = vec![*center];
        for off in lattice_offsets(*radius, grid, prec)? {
            let p = CircleCoord::from_raw(center.raw().wrapping_add(off), prec);
            if self.contains(u, &p)? {
                out.push(p);
            }
        }
        Ok(dedup_in_order(out))
    }
}

/// The skew product `(θ₁, …, θ_d) ↦ (θ₁ + α, θ₂ + θ₁, …, θ_d + θ_{d−1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewProduct {
    pub alpha: CircleCoord,
    pub dim: usize,
    pub max_degree: usize,
}

impl SkewProduct {
    pub fn new(alpha: CircleCoord, dim: usize) -> Result<Self> {
        let max_degree = crate::systems::DEFAULT_MAX_DEGREE;
        if dim == 0 {
            return Err(Error::usage("skew product dimension must be at least 1"));
        }
        Error::check_limit("skew dimension", dim as u64, max_degree as u64)?;
        Ok(SkewProduct {
            alpha,
            dim,
            max_degree,
        })
    }

    fn check(&self, p: &TorusPoint) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::usage(format!(
                "point has dimension {}, system has dimension {}",
                p.dim(),
                self.dim
            )));
        }
        if p.precision() != self.alpha.precision() {
            return Err(Error::usage("point precision differs from the rotation number's"));
        }
        Ok(())
    }
}

impl Dynamics for SkewProduct {
    type Point = TorusPoint;

    fn label(&self) -> String {
        format!("skew:{}:{}", self.dim, self.alpha)
    }

    fn step(&self, p: &mut TorusPoint) -> Result<()> {
        self.check(p)?;
        skew_step_in_place(p, self.alpha.raw());
        Ok(())
    }

    fn unstep(&self, p: &mut TorusPoint) -> Result<()> {
        self.check(p)?;
        skew_unstep_in_place(p, self.alpha.raw());
        Ok(())
    }

    fn iterate(&self, p: &TorusPoint, n: i64) -> Result<TorusPoint> {
        self.check(p)?;
        skew_iterate_signed(p, self.alpha, n, self.max_degree)
    }

    fn distance(&self, a: &TorusPoint, b: &TorusPoint) -> Result<MetricValue> {
        self.check(a)?;
        self.check(b)?;
        Ok(MetricValue::Exact(Dyadic::from_raw(
            raw_torus_distance(a, b),
            a.precision().bits(),
        )))
    }

    fn contains(&self, u: &NeighborhoodSpec<TorusPoint>, p: &TorusPoint) -> Result<bool> {
        match u {
            NeighborhoodSpec::Ball { center, radius } => Ok(self.distance(center, p)?.upper() < *radius),
            NeighborhoodSpec::Cylinder { .. } => Err(cylinder_unsupported("torus skew products")),
        }
    }

    fn samples(&self, u: &NeighborhoodSpec<TorusPoint>, grid: usize, budget: &Budget) -> Result<Vec<TorusPoint>> {
        let NeighborhoodSpec::Ball { center, radius } = u else {
            return Err(cylinder_unsupported("torus skew products"));
        };
        self.check(center)?;
        let count = (grid as u64)
            .checked_pow(self.dim as u32)
            .and_then(|c| c.checked_add(1))
            .unwrap_or(u64::MAX);
        Error::check_limit("neighborhood samples", count, budget.samples)?;
        let prec = center.precision();
        let offsets = lattice_offsets(*radius, grid, prec)?;
        let mut out = vec![center.clone()];
        let mut idx = vec![0usize; self.dim];
        'outer: loop {
            let raw = center
                .raw()
                .iter()
                .zip(&idx)
                .map(|(&c, &i)| c.wrapping_add(offsets[i]))
                .collect();
            let p = TorusPoint::from_raw(raw, prec)?;
            if self.contains(u, &p)? {
                out.push(p);
            }
            for slot in (0..self.dim).rev() {
                idx[slot] += 1;
                if idx[slot] < grid {
                    continue 'outer;
                }
                idx[slot] = 0;
            }
            break;
        }
        Ok(dedup_in_order(out))
    }
}

/// The two-sided shift on rule-defined binary sequences, with the metric
/// `2^{−min |i|}` over disagreements scanned out to `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorseShift {
    pub radius: u32,
    pub max_depth: usize,
}

impl MorseShift {
    pub fn new(radius: u32) -> Self {
        MorseShift {
            radius,
            max_depth: crate::systems::DEFAULT_RULE_DEPTH,
        }
    }

    /// The symbols of `center` that a ball of the given radius pins down,
    /// as `(r, symbols on [−r, r])`; `None` when the ball is everything.
    fn ball_cylinder(&self, center: &SymbolicPoint, radius: Dyadic) -> Result<Option<(u32, Vec<u8>)>> {
        // d(p, q) = 2^{−j} < ρ exactly when the points agree on |i| < j₀,
        // with j₀ the least j such that 2^{−j} < ρ.
        let mut j0 = 0u32;
        while Dyadic::pow2_neg(j0) >= radius {
            j0 += 1;
            if j0 > 4096 {
                return Err(Error::usage("ball radius is too small to scan"));
            }
        }
        if j0 == 0 {
            return Ok(None);
        }
        let r = j0 - 1;
        let symbols = (-(r as i64)..=r as i64)
            .map(|i| symbolic_eval(center, i, self.max_depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((r, symbols)))
    }

    fn matches(&self, r: u32, symbols: &[u8], p: &SymbolicPoint) -> Result<bool> {
        if symbols.len() != 2 * r as usize + 1 {
            return Err(Error::usage("cylinder pattern length must be 2r + 1"));
        }
        for (k, &s) in symbols.iter().enumerate() {
            if symbolic_eval(p, k as i64 - r as i64, self.max_depth)? != s {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn catalog_bases() -> [SymbolicPoint; 4] {
        [
            SymbolicPoint::MorseOmega,
            SymbolicPoint::MorseOmega.flip(),
            SymbolicPoint::Eta,
            SymbolicPoint::Eta.flip(),
        ]
    }
}

impl Dynamics for MorseShift {
    type Point = SymbolicPoint;

    fn label(&self) -> String {
        "morse".to_string()
    }

    fn step(&self, p: &mut SymbolicPoint) -> Result<()> {
        *p = p.shifted(1)?;
        Ok(())
    }

    fn unstep(&self, p: &mut SymbolicPoint) -> Result<()> {
        *p = p.shifted(-1)?;
        Ok(())
    }

    fn iterate(&self, p: &SymbolicPoint, n: i64) -> Result<SymbolicPoint> {
        p.shifted(n)
    }

    fn distance(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> Result<MetricValue> {
        symbolic_metric(a, b, self.radius, self.max_depth)
    }

    fn contains(&self, u: &NeighborhoodSpec<SymbolicPoint>, p: &SymbolicPoint) -> Result<bool> {
        match u {
            NeighborhoodSpec::Ball { center, radius } => match self.ball_cylinder(center, *radius)? {
                None => Ok(true),
                Some((r, symbols)) => self.matches(r, &symbols, p),
            },
            NeighborhoodSpec::Cylinder { radius, symbols } => self.matches(*radius, symbols, p),
        }
    }

    /// Balls start with their center. The remaining samples are drawn from
    /// the catalog `σᵏξ`, `ξ ∈ {ω, ω̄, η, η̄}`, `|k| ≤ 64·grid`, in order of
    /// increasing `|k|`, keeping those inside `u`.
    fn samples(&self, u: &NeighborhoodSpec<SymbolicPoint>, grid: usize, budget: &Budget) -> Result<Vec<SymbolicPoint>> {
        if grid == 0 {
            return Err(Error::usage("grid resolution must be positive"));
        }
        let mut out = Vec::new();
        if let NeighborhoodSpec::Ball { center, .. } = u {
            out.push(center.clone());
        }
        let reach = 64 * grid as i64;
        let bases = Self::catalog_bases();
        for m in 0..=reach {
            for k in if m == 0 { vec![0] } else { vec![m, -m] } {
                for base in &bases {
                    let p = base.shifted(k)?;
                    if self.contains(u, &p)? {
                        out.push(p);
                        if out.len() as u64 >= budget.samples {
                            return Ok(dedup_in_order(out));
                        }
                    }
                }
            }
        }
        Ok(dedup_in_order(out))
    }
}
