use super::function::FeFunction;
use super::mesh::FeLevel;
use crate::error::{Error, Result};
use crate::field::FieldRealization;

/// P1 stiffness matrix `∫ a ∇φ_i·∇φ_j` with one coefficient value per triangle.
///
/// On this triangulation the couplings across cell diagonals vanish, so the
/// matrix is stored as a symmetric 5-point stencil over all nodes:
/// `diag[k]`, `east[k]` (coupling `k ↔ k+1`) and `north[k]` (`k ↔ k+n`).
#[derive(Clone, Debug)]
pub struct StiffnessMatrix {
    mesh: FeLevel,
    coef: Vec<f64>,
    diag: Vec<f64>,
    east: Vec<f64>,
    north: Vec<f64>,
}

impl StiffnessMatrix {
    pub fn from_coefficients(mesh: FeLevel, coef: Vec<f64>) -> Result<Self> {
        if coef.len() != mesh.num_triangles() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_triangles(),
                got: coef.len(),
            });
        }
        let n = mesh.nodes_per_axis();
        let m = mesh.num_nodes();
        let mut diag = vec![0.0; m];
        let mut east = vec![0.0; m];
        let mut north = vec![0.0; m];
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let cell = i + (n - 1) * j;
                let v00 = i + n * j;
                let v10 = v00 + 1;
                let v01 = v00 + n;
                let v11 = v01 + 1;
                let lo = 0.5 * coef[2 * cell];
                diag[v00] += lo;
                diag[v10] += 2.0 * lo;
                diag[v11] += lo;
                east[v00] -= lo;
                north[v10] -= lo;
                let up = 0.5 * coef[2 * cell + 1];
                diag[v00] += up;
                diag[v11] += up;
                diag[v01] += 2.0 * up;
                north[v00] -= up;
                east[v01] -= up;
            }
        }
        Ok(Self {
            mesh,
            coef,
            diag,
            east,
            north,
        })
    }

    pub fn mesh(&self) -> &FeLevel {
        &self.mesh
    }

    /// Per-triangle coefficient values.
    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `y = A x` over every node, boundary rows included (no elimination).
    pub fn apply_full(&self, x: &[f64], y: &mut [f64]) {
        let n = self.mesh.nodes_per_axis();
        for k in 0..x.len() {
            let mut acc = self.diag[k] * x[k];
            let i = k % n;
            if i + 1 < n {
                acc += self.east[k] * x[k + 1];
            }
            if i > 0 {
                acc += self.east[k - 1] * x[k - 1];
            }
            if k + n < x.len() {
                acc += self.north[k] * x[k + n];
            }
            if k >= n {
                acc += self.north[k - n] * x[k - n];
            }
            y[k] = acc;
        }
    }

    /// `y = A x` on interior rows after Dirichlet elimination. Boundary
    /// entries of `x` must be zero; boundary entries of `y` are set to zero.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.mesh.nodes_per_axis();
        y[..n].fill(0.0);
        y[n * (n - 1)..].fill(0.0);
        for j in 1..n - 1 {
            let row = n * j;
            y[row] = 0.0;
            y[row + n - 1] = 0.0;
            for k in row + 1..row + n - 1 {
                y[k] = self.diag[k] * x[k]
                    + self.east[k] * x[k + 1]
                    + self.east[k - 1] * x[k - 1]
                    + self.north[k] * x[k + n]
                    + self.north[k - n] * x[k - n];
            }
        }
    }

    /// One Gauss–Seidel sweep on interior nodes, forward or backward.
    pub(crate) fn gauss_seidel(&self, x: &mut [f64], b: &[f64], forward: bool) {
        let n = self.mesh.nodes_per_axis();
        let mut sweep = |k: usize| {
            let s = b[k]
                - self.east[k] * x[k + 1]
                - self.east[k - 1] * x[k - 1]
                - self.north[k] * x[k + n]
                - self.north[k - n] * x[k - n];
            x[k] = s / self.diag[k];
        };
        if forward {
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    sweep(i + n * j);
                }
            }
        } else {
            for j in (1..n - 1).rev() {
                for i in (1..n - 1).rev() {
                    sweep(i + n * j);
                }
            }
        }
    }

    /// Galerkin coarse operator `Pᵀ A P` for the next coarser mesh. Each coarse
    /// triangle's coefficient is the mean over its four child triangles.
    pub fn coarsen(&self) -> Option<StiffnessMatrix> {
        let coarse = self.mesh.coarser()?;
        let nf = self.mesh.nodes_per_axis() - 1;
        let nc = coarse.nodes_per_axis() - 1;
        let mut coef = vec![0.0; coarse.num_triangles()];
        let t = |i: usize, j: usize, upper: usize| 2 * (i + nf * j) + upper;
        for jc in 0..nc {
            for ic in 0..nc {
                let (i, j) = (2 * ic, 2 * jc);
                let c = &self.coef;
                let lower = c[t(i + 1, j, 0)] + c[t(i + 1, j, 1)] + c[t(i, j, 0)] + c[t(i + 1, j + 1, 0)];
                let upper = c[t(i, j + 1, 0)] + c[t(i, j + 1, 1)] + c[t(i, j, 1)] + c[t(i + 1, j + 1, 1)];
                let cell = ic + nc * jc;
                coef[2 * cell] = 0.25 * lower;
                coef[2 * cell + 1] = 0.25 * upper;
            }
        }
        StiffnessMatrix::from_coefficients(coarse, coef).ok()
    }

    /// Dense interior block, row-major over interior nodes.
    pub fn to_dense_interior(&self) -> Vec<Vec<f64>> {
        let n = self.mesh.nodes_per_axis();
        let interior: Vec<usize> = (0..self.mesh.num_nodes())
            .filter(|&k| !self.mesh.is_boundary(k))
            .collect();
        let mut e = vec![0.0; self.mesh.num_nodes()];
        let mut col = vec![0.0; self.mesh.num_nodes()];
        let mut dense = vec![vec![0.0; interior.len()]; interior.len()];
        for (c, &kc) in interior.iter().enumerate() {
            e[kc] = 1.0;
            self.apply(&e, &mut col);
            e[kc] = 0.0;
            for (r, &kr) in interior.iter().enumerate() {
                dense[r][c] = col[kr];
            }
        }
        let _ = n;
        dense
    }
}

/// Stiffness matrix with the coefficient evaluated at triangle centroids.
pub fn assemble_stiffness_with(mesh: FeLevel, a: impl Fn([f64; 2]) -> f64) -> StiffnessMatrix {
    let coef = (0..mesh.num_triangles())
        .map(|t| a(mesh.centroid(t)))
        .collect();
    StiffnessMatrix::from_coefficients(mesh, coef).expect("coefficient length matches")
}

/// Stiffness matrix for a sampled field.
pub fn assemble_stiffness(mesh: FeLevel, a: &FieldRealization) -> StiffnessMatrix {
    assemble_stiffness_with(mesh, |x| a.eval(&x))
}

/// `∫ f φ_i` for every node (no elimination), edge-midpoint rule per triangle.
pub fn assemble_load_full(mesh: FeLevel, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; mesh.num_nodes()];
    let w = mesh.triangle_area() / 6.0;
    for t in 0..mesh.num_triangles() {
        let v = mesh.triangle(t);
        let p: Vec<[f64; 2]> = v.iter().map(|&k| mesh.node(k)).collect();
        let mid = |a: usize, c: usize| [0.5 * (p[a][0] + p[c][0]), 0.5 * (p[a][1] + p[c][1])];
        let f01 = f(mid(0, 1));
        let f12 = f(mid(1, 2));
        let f02 = f(mid(0, 2));
        b[v[0]] += w * (f01 + f02);
        b[v[1]] += w * (f01 + f12);
        b[v[2]] += w * (f12 + f02);
    }
    b
}

/// Load vector with Dirichlet rows zeroed.
pub fn assemble_load(mesh: FeLevel, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    let mut b = assemble_load_full(mesh, f);
    zero_boundary(&mesh, &mut b);
    b
}

pub(crate) fn zero_boundary(mesh: &FeLevel, v: &mut [f64]) {
    let n = mesh.nodes_per_axis();
    v[..n].fill(0.0);
    v[n * (n - 1)..].fill(0.0);
    for j in 1..n - 1 {
        v[n * j] = 0.0;
        v[n * j + n - 1] = 0.0;
    }
}

/// `M v` with the consistent P1 mass matrix, all nodes.
pub fn mass_apply(mesh: FeLevel, v: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; v.len()];
    let w = mesh.triangle_area() / 12.0;
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle(t);
        let s = v[a] + v[b] + v[c];
        y[a] += w * (v[a] + s);
        y[b] += w * (v[b] + s);
        y[c] += w * (v[c] + s);
    }
    y
}

/// `uᵀ M v` with the consistent P1 mass matrix.
pub fn l2_inner_values(mesh: FeLevel, u: &[f64], v: &[f64]) -> f64 {
    let w = mesh.triangle_area() / 12.0;
    let mut acc = 0.0;
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle(t);
        let su = u[a] + u[b] + u[c];
        let sv = v[a] + v[b] + v[c];
        acc += w * (su * sv + u[a] * v[a] + u[b] * v[b] + u[c] * v[c]);
    }
    acc
}

/// `‖f‖_{L²(D)}`.
pub fn l2_norm(f: &FeFunction) -> f64 {
    l2_inner_values(*f.mesh(), f.values(), f.values()).max(0.0).sqrt()
}
