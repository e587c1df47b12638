//! Potentials, pressure brackets and the dimension roots built from them.

pub mod dimension;
pub mod potential;
pub mod pressure;

pub use dimension::{
    affinity_dimension, alpha_hat, beta_hat, r0_interval, s0_interval, BetaEstimate, BetaInput, DimensionKind,
    DimensionReport, TargetSequence,
};
pub use potential::{log_potential, potential_value, sv_pieces, PotentialKind, PotentialSpec};
pub use pressure::{pressure_bracket, square_pressure, PressureBracket, PressureEngine, QmInput};
