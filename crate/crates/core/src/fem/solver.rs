use super::assembly::{zero_boundary, StiffnessMatrix};
use super::transfer::{prolong_values, restrict_values};
use crate::error::{Error, Result};

/// Relative residual tolerance for all linear solves.
pub const SOLVER_TOL: f64 = 1e-10;

/// Meshes with fewer nodes per axis than this use Jacobi-preconditioned CG.
pub const MULTIGRID_MIN_NODES: usize = 17;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// SPD solver for a Dirichlet-eliminated stiffness system.
///
/// Preconditioned CG with a symmetric V(1,1) multigrid cycle built from
/// Galerkin coarse operators, or plain diagonal scaling on small meshes.
#[derive(Clone, Debug)]
pub struct SpdSolver {
    // finest first
    levels: Vec<StiffnessMatrix>,
    multigrid: bool,
    tol: f64,
}

impl SpdSolver {
    pub fn new(a: StiffnessMatrix) -> Self {
        let multigrid = a.mesh().nodes_per_axis() >= MULTIGRID_MIN_NODES;
        Self::with_options(a, multigrid, SOLVER_TOL)
    }

    pub fn with_options(a: StiffnessMatrix, multigrid: bool, tol: f64) -> Self {
        let mut levels = vec![a];
        if multigrid {
            while let Some(c) = levels.last().unwrap().coarsen() {
                levels.push(c);
            }
        }
        let multigrid = multigrid && levels.len() > 1;
        Self {
            levels,
            multigrid,
            tol,
        }
    }

    pub fn matrix(&self) -> &StiffnessMatrix {
        &self.levels[0]
    }

    pub fn uses_multigrid(&self) -> bool {
        self.multigrid
    }

    pub fn max_iterations(&self) -> usize {
        let m = self.levels[0].mesh().num_nodes() as f64;
        (10.0 * m.sqrt()).ceil() as usize
    }

    fn precondition(&self, r: &[f64], z: &mut [f64]) {
        if self.multigrid {
            let x = self.vcycle(0, r);
            z.copy_from_slice(&x);
        } else {
            let d = self.levels[0].diagonal();
            for k in 0..r.len() {
                z[k] = r[k] / d[k];
            }
            zero_boundary(self.levels[0].mesh(), z);
        }
    }

    fn vcycle(&self, lvl: usize, b: &[f64]) -> Vec<f64> {
        let a = &self.levels[lvl];
        let mesh = *a.mesh();
        let mut x = vec![0.0; b.len()];
        if lvl + 1 == self.levels.len() {
            // coarsest: a handful of symmetric sweeps is an exact enough solve
            // when there is one unknown, and a good one otherwise
            let sweeps = if mesh.num_interior() == 1 { 1 } else { 8 };
            for _ in 0..sweeps {
                a.gauss_seidel(&mut x, b, true);
                a.gauss_seidel(&mut x, b, false);
            }
            return x;
        }
        a.gauss_seidel(&mut x, b, true);
        let mut r = vec![0.0; b.len()];
        a.apply(&x, &mut r);
        for k in 0..r.len() {
            r[k] = b[k] - r[k];
        }
        let coarse = *self.levels[lvl + 1].mesh();
        let mut rc = vec![0.0; coarse.num_nodes()];
        restrict_values(coarse, mesh, &r, &mut rc);
        zero_boundary(&coarse, &mut rc);
        let ec = self.vcycle(lvl + 1, &rc);
        prolong_values(coarse, mesh, &ec, &mut r);
        for k in 0..x.len() {
            x[k] += r[k];
        }
        a.gauss_seidel(&mut x, b, false);
        x
    }

    /// Solves `A x = b` on interior nodes; boundary entries of `b` are ignored
    /// and boundary entries of `x` are zero.
    pub fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, SolveStats)> {
        let a = &self.levels[0];
        let mesh = *a.mesh();
        if b.len() != mesh.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_nodes(),
                got: b.len(),
            });
        }
        let mut rhs = b.to_vec();
        zero_boundary(&mesh, &mut rhs);
        let bnorm = norm(&rhs);
        let mut x = vec![0.0; rhs.len()];
        if bnorm == 0.0 {
            return Ok((
                x,
                SolveStats {
                    iterations: 0,
                    relative_residual: 0.0,
                },
            ));
        }
        let cap = self.max_iterations();
        let mut r = rhs.clone();
        let mut z = vec![0.0; r.len()];
        let mut p = vec![0.0; r.len()];
        let mut ap = vec![0.0; r.len()];
        let mut it = 0;
        loop {
            self.precondition(&r, &mut z);
            p.copy_from_slice(&z);
            let mut rz = dot(&r, &z);
            let mut converged = false;
            while it < cap {
                it += 1;
                a.apply(&p, &mut ap);
                let alpha = rz / dot(&p, &ap);
                for k in 0..x.len() {
                    x[k] += alpha * p[k];
                    r[k] -= alpha * ap[k];
                }
                if norm(&r) <= self.tol * bnorm {
                    converged = true;
                    break;
                }
                self.precondition(&r, &mut z);
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for k in 0..p.len() {
                    p[k] = z[k] + beta * p[k];
                }
            }
            // recompute the true residual; restart if recurrence drift hid it
            a.apply(&x, &mut ap);
            for k in 0..r.len() {
                r[k] = rhs[k] - ap[k];
            }
            let rel = norm(&r) / bnorm;
            if rel <= self.tol {
                return Ok((
                    x,
                    SolveStats {
                        iterations: it,
                        relative_residual: rel,
                    },
                ));
            }
            if !converged || it >= cap {
                return Err(Error::SolverDiverged {
                    iterations: it,
                    residual: rel,
                });
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
