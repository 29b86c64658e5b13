//! Potentials, grids and finite-difference assembly of the operator family.

pub mod assembly;
pub mod grid;
pub mod matrix;
pub mod potential;

pub use assembly::{
    assemble_h, assemble_h_extended, assemble_h_sector, assemble_hat_h, assemble_p_dyadic, dyadic_exit_couplings, numerical_range_bound, numerical_range_gap,
    sector_nodes, HatWeight, OperatorConfig, Parity,
};
pub use grid::{auto_half_width, well_width, DyadicGrid, Grid, GridRule, DEFAULT_NODES};
pub use matrix::{ComplexBandedMatrix, ExtendedTridiagonal, SymTridiagonal};
pub use potential::{CubicSpline, Potential, PotentialKind};
