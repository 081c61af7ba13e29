use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform grid of `n^d` points covering `[0,1]^d`, boundary included.
///
/// Points are numbered with the first axis running fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformGrid {
    dim: usize,
    n: usize,
}

impl UniformGrid {
    pub fn new(dim: usize, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Domain(format!("grid dimension {dim} not in 1..=3")));
        }
        if points_per_axis < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points per axis, got {points_per_axis}"
            )));
        }
        Ok(Self {
            dim,
            n: points_per_axis,
        })
    }

    /// The `(2^level + 1)^dim` grid.
    pub fn dyadic(dim: usize, level: usize) -> Result<Self> {
        Self::new(dim, (1 << level) + 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    pub fn num_points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn multi_index(&self, mut i: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in idx.iter_mut().take(self.dim) {
            *a = i % self.n;
            i /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .rev()
            .fold(0, |acc, &k| acc * self.n + k)
    }

    pub fn point(&self, i: usize) -> [f64; 3] {
        let idx = self.multi_index(i);
        let h = (self.n - 1) as f64;
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = idx[a] as f64 / h;
        }
        x
    }

    /// Refinement ratio `r` such that coarse node `i` sits at fine node `r·i`
    /// along every axis, or `None` if `self` is not nested in `fine`.
    pub fn nesting_ratio(&self, fine: &UniformGrid) -> Option<usize> {
        if self.dim != fine.dim || (fine.n - 1) % (self.n - 1) != 0 {
            return None;
        }
        Some((fine.n - 1) / (self.n - 1))
    }
}
