//! Exact window-scale laboratory for sensitivity of minimal dynamical
//! systems: family combinatorics of return-time sets, exact simulation of
//! rotations, torus skew products and the Morse subshift, and witness
//! searches over their orbits.

pub mod analysis;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod families;
pub mod oracle;
pub mod systems;

pub use dyadic::{Dyadic, Exceedance, MetricValue};
pub use error::{Error, ParseError, Result};
pub use families::{
    classify_window, delta_closure, find_finite_difference, find_finite_ip, fs_closure,
    max_block_length, min_syndetic_bound, ramsey_split_check, DeltaConvention, FamilyCaps,
    FamilyProfile, FamilyWitness, GeneratorSeq, WindowSet,
};
pub use systems::{CircleCoord, Precision, SymbolicPoint, TorusPoint};
pub use analysis::{
    Budget, Dynamics, MorseShift, NeighborhoodSpec, Rotation, SearchStatus, SkewProduct,
};
pub use experiments::{registry, run_all, run_experiment, Observation, Report, Verdict};
