use crate::error::{Error, Result};

/// Uniform triangulation of the unit square: `n × n` nodes, every cell
/// split along its lower-left to upper-right diagonal.
///
/// Node `(i, j)` has index `i + n·j`. Triangle `2·(i + (n−1)·j)` is the lower
/// triangle of cell `(i, j)` with vertices `(i,j), (i+1,j), (i+1,j+1)`;
/// triangle `2·(i + (n−1)·j) + 1` is the upper one with vertices
/// `(i,j), (i+1,j+1), (i,j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeLevel {
    level: usize,
    n: usize,
}

impl FeLevel {
    /// Level `ℓ` of the standard hierarchy, `(2^{2+ℓ} + 1)^2` nodes.
    pub fn new(level: usize) -> Self {
        Self {
            level,
            n: (1 << (2 + level)) + 1,
        }
    }

    /// Mesh with an arbitrary node count per axis.
    pub fn with_nodes(level: usize, nodes_per_axis: usize) -> Result<Self> {
        if nodes_per_axis < 3 {
            return Err(Error::Domain(format!(
                "FE mesh needs at least 3 nodes per axis, got {nodes_per_axis}"
            )));
        }
        Ok(Self {
            level,
            n: nodes_per_axis,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    /// All nodes, boundary included.
    pub fn num_nodes(&self) -> usize {
        self.n * self.n
    }

    pub fn num_interior(&self) -> usize {
        (self.n - 2) * (self.n - 2)
    }

    pub fn num_triangles(&self) -> usize {
        2 * (self.n - 1) * (self.n - 1)
    }

    pub fn node(&self, k: usize) -> [f64; 2] {
        let h = (self.n - 1) as f64;
        [(k % self.n) as f64 / h, (k / self.n) as f64 / h]
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = (k % self.n, k / self.n);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    /// Vertex indices of triangle `t`.
    #[inline]
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        let cell = t / 2;
        let (i, j) = (cell % (self.n - 1), cell / (self.n - 1));
        let v00 = i + self.n * j;
        let v10 = v00 + 1;
        let v01 = v00 + self.n;
        let v11 = v01 + 1;
        if t % 2 == 0 {
            [v00, v10, v11]
        } else {
            [v00, v11, v01]
        }
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let cell = t / 2;
        let h = self.h();
        let x0 = (cell % (self.n - 1)) as f64 * h;
        let y0 = (cell / (self.n - 1)) as f64 * h;
        if t % 2 == 0 {
            [x0 + 2.0 * h / 3.0, y0 + h / 3.0]
        } else {
            [x0 + h / 3.0, y0 + 2.0 * h / 3.0]
        }
    }

    pub fn triangle_area(&self) -> f64 {
        0.5 * self.h() * self.h()
    }

    /// Refinement ratio if `self` is nested in `fine`.
    pub fn nesting_ratio(&self, fine: &FeLevel) -> Option<usize> {
        if (fine.n - 1) % (self.n - 1) != 0 {
            return None;
        }
        Some((fine.n - 1) / (self.n - 1))
    }

    /// The mesh with half as many cells per axis, if it exists.
    pub fn coarser(&self) -> Option<FeLevel> {
        if (self.n - 1) % 2 == 0 && self.n > 3 {
            Some(FeLevel {
                level: self.level.saturating_sub(1),
                n: (self.n - 1) / 2 + 1,
            })
        } else {
            None
        }
    }
}
