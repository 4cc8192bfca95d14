//! Orbit analytics over the concrete systems: return-time and hitting-time
//! sets, divergence and sensitivity sets, proximality, regional-proximality
//! witnesses, pigeonhole recurrence and measure-based selection.
//!
//! Every search over an unbounded object is one-sided: a reported element
//! or witness is certified by concrete points, while absence only means the
//! budget ran out.

mod dynamics;
mod measure;
mod orbit;
mod recurrence;
mod rp;

pub use dynamics::{Dynamics, MorseShift, Rotation, SkewProduct};
pub use measure::{
    gillis_select, ip_overlap_search, CellGrid, CellSet, CellSpace, GillisOutcome, IpOverlapOutcome,
    SelectionStrategy, BEAM_WIDTH, EXHAUSTIVE_LIMIT,
};
pub use orbit::{
    divergence_profile, hitting_times, proximality_inf, return_times, sensitivity_set, Direction,
    DivergenceProfile, ProximalityMin, SignedWindow,
};
pub use recurrence::{pigeonhole_recurrence, PigeonholeOutcome};
pub use rp::{rp_witness_search, RpSearchOutcome, RpWitness, MAX_RP_ORDER};

use serde::Serialize;

use crate::dyadic::Dyadic;

/// Per-call resource limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Maximum orbit length (window size) of a single scan.
    pub orbit_steps: u64,
    /// Maximum number of sample points drawn from one neighborhood.
    pub samples: u64,
    /// Maximum number of elementary candidate checks in a witness search.
    pub search_checks: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            orbit_steps: 10_000_000,
            samples: 1 << 16,
            search_checks: 500_000_000,
        }
    }
}

/// An open neighborhood: a metric ball, or a cylinder fixing the symbols on
/// `[−radius, radius]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NeighborhoodSpec<P> {
    Ball { center: P, radius: Dyadic },
    Cylinder { radius: u32, symbols: Vec<u8> },
}

impl<P> NeighborhoodSpec<P> {
    pub fn ball(center: P, radius: Dyadic) -> Self {
        NeighborhoodSpec::Ball { center, radius }
    }
}

/// Whether a search ended with a certified witness, ran through its whole
/// finite space, or stopped at a budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    AbsentExhaustive,
    AbsentBudget,
}
