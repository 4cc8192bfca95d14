//! Concrete systems: circle rotations, torus skew products and the Morse
//! subshift, all with exact arithmetic.

pub mod circle;
pub mod symbolic;
pub mod torus;

pub use circle::{circle_metric, rotation_iterate, CircleCoord, Precision};
pub use symbolic::{
    morse_symbol, odometer_coordinate, symbolic_eval, symbolic_metric, SymbolicPoint,
    DEFAULT_RULE_DEPTH,
};
pub use torus::{
    binomial_row, binomial_wrap, signed_binomial_row, skew_from_row, skew_iterate_closed,
    skew_iterate_signed, skew_step, skew_step_in_place, skew_unstep_in_place, torus_metric,
    BinomialRows, TorusPoint, DEFAULT_MAX_DEGREE,
};
