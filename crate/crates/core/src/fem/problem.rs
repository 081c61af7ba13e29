use super::assembly::{assemble_load, assemble_stiffness, mass_apply, zero_boundary};
use super::function::FeFunction;
use super::mesh::FeLevel;
use super::solver::{SolveStats, SpdSolver};
use crate::error::{Error, Result};
use crate::field::FieldRealization;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scalar function on the unit square, in a form that can live in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialFn {
    Zero,
    Constant { value: f64 },
    /// `value` inside the box `[lo, hi]`, zero outside. On the box faces the
    /// factor per axis is 1/2, so quadrature points on the edges count half.
    Indicator { lo: [f64; 2], hi: [f64; 2], value: f64 },
    /// `amplitude · (1 − cos 2πx₁)(1 − cos 2πx₂)`.
    CosineBump { amplitude: f64 },
    /// `amplitude · sin(πx₁) sin(πx₂)`.
    SineProduct { amplitude: f64 },
}

impl SpatialFn {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match *self {
            SpatialFn::Zero => 0.0,
            SpatialFn::Constant { value } => value,
            SpatialFn::Indicator { lo, hi, value } => {
                value * box_factor(x[0], lo[0], hi[0]) * box_factor(x[1], lo[1], hi[1])
            }
            SpatialFn::CosineBump { amplitude } => {
                amplitude * (1.0 - (2.0 * PI * x[0]).cos()) * (1.0 - (2.0 * PI * x[1]).cos())
            }
            SpatialFn::SineProduct { amplitude } => {
                amplitude * (PI * x[0]).sin() * (PI * x[1]).sin()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            SpatialFn::Zero => true,
            SpatialFn::Constant { value } => value == 0.0,
            SpatialFn::Indicator { value, .. } => value == 0.0,
            SpatialFn::CosineBump { amplitude } | SpatialFn::SineProduct { amplitude } => {
                amplitude == 0.0
            }
        }
    }
}

fn box_factor(t: f64, lo: f64, hi: f64) -> f64 {
    if t > lo && t < hi {
        1.0
    } else if t == lo || t == hi {
        0.5
    } else {
        0.0
    }
}

/// Tracking target `g`, control `z` and regularization weight `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetAndControl {
    pub g: SpatialFn,
    pub z: SpatialFn,
    pub alpha: f64,
}

impl TargetAndControl {
    /// `g = 1_{[0.25,0.75]²}`, `z = 5(1−cos 2πx₁)(1−cos 2πx₂)`.
    pub fn standard(alpha: f64) -> Self {
        Self {
            g: SpatialFn::Indicator {
                lo: [0.25, 0.25],
                hi: [0.75, 0.75],
                value: 1.0,
            },
            z: SpatialFn::CosineBump { amplitude: 5.0 },
            alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "regularization alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// State solve `−∇·(a∇u) = z`, `u = 0` on the boundary.
pub fn solve_state(mesh: FeLevel, a: &FieldRealization, z: &SpatialFn) -> Result<FeFunction> {
    let solver = SpdSolver::new(assemble_stiffness(mesh, a));
    let b = assemble_load(mesh, |x| z.eval(x));
    let (u, _) = solver.solve(&b)?;
    FeFunction::from_values(mesh, u)
}

/// Adjoint solve `−∇·(a∇q) = u − g`, `q = 0` on the boundary.
pub fn solve_adjoint(
    mesh: FeLevel,
    a: &FieldRealization,
    u: &FeFunction,
    g: &SpatialFn,
) -> Result<FeFunction> {
    if *u.mesh() != mesh {
        return Err(Error::DimensionMismatch {
            expected: mesh.num_nodes(),
            got: u.values().len(),
        });
    }
    let solver = SpdSolver::new(assemble_stiffness(mesh, a));
    let b = assemble_load(mesh, |x| u.eval(x) - g.eval(x));
    let (q, _) = solver.solve(&b)?;
    FeFunction::from_values(mesh, q)
}

/// Per-level state/adjoint pair solver with the `z` and `g` loads cached.
///
/// The adjoint load is `M u − b_g`, which equals the edge-midpoint load of
/// `u − g` because the rule is exact for the P1 part.
#[derive(Clone, Debug)]
pub struct PdeLevel {
    mesh: FeLevel,
    load_z: Vec<f64>,
    load_g: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PairSolution {
    pub state: FeFunction,
    pub adjoint: FeFunction,
    pub state_stats: SolveStats,
    pub adjoint_stats: SolveStats,
}

impl PdeLevel {
    pub fn new(mesh: FeLevel, problem: &TargetAndControl) -> Self {
        let mut load_g = assemble_load(mesh, |x| problem.g.eval(x));
        zero_boundary(&mesh, &mut load_g);
        Self {
            mesh,
            load_z: assemble_load(mesh, |x| problem.z.eval(x)),
            load_g,
        }
    }

    pub fn mesh(&self) -> &FeLevel {
        &self.mesh
    }

    pub fn solve(&self, a: &FieldRealization) -> Result<PairSolution> {
        let solver = SpdSolver::new(assemble_stiffness(self.mesh, a));
        let (u, state_stats) = solver.solve(&self.load_z)?;
        let mut b = mass_apply(self.mesh, &u);
        for (bi, gi) in b.iter_mut().zip(&self.load_g) {
            *bi -= gi;
        }
        zero_boundary(&self.mesh, &mut b);
        let (q, adjoint_stats) = solver.solve(&b)?;
        Ok(PairSolution {
            state: FeFunction::from_values(self.mesh, u)?,
            adjoint: FeFunction::from_values(self.mesh, q)?,
            state_stats,
            adjoint_stats,
        })
    }
}
