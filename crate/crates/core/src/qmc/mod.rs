//! Randomly shifted rank-1 lattice rules and the map from the unit cube to
//! standard normal inputs.

mod genvec;
mod lattice;
mod normal;

pub use genvec::{GeneratingVector, DEFAULT_N_MAX, DEFAULT_N_MIN};
pub use lattice::{clamp_unit, lattice_point, lattice_point_into, ShiftSet, UNIT_CLAMP};
pub use normal::{inv_norm_cdf, to_normal};
