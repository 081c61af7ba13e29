//! P1 finite elements on uniform triangulations of the unit square.
mod assembly;
mod function;
mod mesh;
mod problem;
mod solver;
mod transfer;

pub use assembly::{
    assemble_load, assemble_load_full, assemble_stiffness, assemble_stiffness_with,
    l2_inner_values, l2_norm, mass_apply, StiffnessMatrix,
};
pub use function::FeFunction;
pub use mesh::FeLevel;
pub use problem::{solve_adjoint, solve_state, PairSolution, PdeLevel, SpatialFn, TargetAndControl};
pub use solver::{SolveStats, SpdSolver, MULTIGRID_MIN_NODES, SOLVER_TOL};
pub use transfer::prolong;
