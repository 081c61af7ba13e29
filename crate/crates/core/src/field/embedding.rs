use super::grid::UniformGrid;
use super::realization::FieldRealization;
use crate::covariance::{CovarianceKernel, MeanField};
use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Controls the positivity check and padding loop of [`build_embedding`].
#[derive(Clone, Copy, Debug)]
pub struct EmbeddingOptions {
    /// Eigenvalues in `[-tol·max, 0)` are clamped to zero.
    pub tol: f64,
    /// Number of times the extension may be doubled.
    pub max_doublings: usize,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_doublings: 12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Cos,
    Sin,
}

/// One real column of the orthogonal eigenbasis of the circulant matrix.
#[derive(Clone, Copy, Debug)]
struct Direction {
    freq: usize,
    part: Part,
    /// `sqrt(c·λ/s)`, `c = 2` for conjugate pairs, `1` for self-conjugate frequencies.
    weight: f64,
    eigenvalue: f64,
}

/// Circulant embedding of the covariance matrix on a uniform grid.
///
/// Immutable once built; shareable across threads.
pub struct CirculantEmbedding {
    grid: UniformGrid,
    ext: usize,
    eigenvalues: Vec<f64>,
    directions: Vec<Direction>,
    importance_order: Vec<usize>,
    clamped: usize,
    min_eigenvalue_ratio: f64,
    doublings: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirculantEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantEmbedding")
            .field("grid", &self.grid)
            .field("ext_per_axis", &self.ext)
            .field("s", &self.stochastic_dim())
            .field("clamped", &self.clamped)
            .field("doublings", &self.doublings)
            .finish()
    }
}

/// Applies an FFT along every axis of a `m^d` array stored first-axis-fastest.
fn fft_nd(data: &mut [Complex64], m: usize, dim: usize, fft: &dyn Fft<f64>) {
    let mut lane = vec![Complex64::default(); m];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let total = data.len();
    let mut stride = 1;
    for _ in 0..dim {
        let block = stride * m;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (k, v) in lane.iter_mut().enumerate() {
                    *v = data[start + k * stride];
                }
                fft.process_with_scratch(&mut lane, &mut scratch);
                for (k, v) in lane.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
        stride = block;
    }
}

fn ext_multi_index(mut i: usize, m: usize, dim: usize) -> [usize; 3] {
    let mut idx = [0; 3];
    for a in idx.iter_mut().take(dim) {
        *a = i % m;
        i /= m;
    }
    idx
}

fn ext_flat(idx: &[usize; 3], m: usize, dim: usize) -> usize {
    (0..dim).rev().fold(0, |acc, a| acc * m + idx[a])
}

fn negate_freq(i: usize, m: usize, dim: usize) -> usize {
    let mut idx = ext_multi_index(i, m, dim);
    for a in idx.iter_mut().take(dim) {
        *a = (m - *a) % m;
    }
    ext_flat(&idx, m, dim)
}

/// Builds the circulant embedding, doubling the extension until the
/// spectrum is nonnegative up to `opts.tol`.
pub fn build_embedding(
    kernel: &dyn CovarianceKernel,
    grid: UniformGrid,
    opts: EmbeddingOptions,
) -> Result<CirculantEmbedding> {
    let dim = grid.dim();
    let h = grid.spacing();
    let mut ext = 2 * (grid.points_per_axis() - 1);
    let mut planner = FftPlanner::<f64>::new();
    let mut worst = f64::NEG_INFINITY;

    for attempt in 0..=opts.max_doublings {
        let s = ext.pow(dim as u32);
        let mut col: Vec<Complex64> = (0..s)
            .map(|i| {
                let idx = ext_multi_index(i, ext, dim);
                let r2: f64 = (0..dim)
                    .map(|a| {
                        let k = idx[a].min(ext - idx[a]) as f64 * h;
                        k * k
                    })
                    .sum();
                Complex64::new(kernel.cov(r2.sqrt()), 0.0)
            })
            .collect();
        let forward = planner.plan_fft_forward(ext);
        fft_nd(&mut col, ext, dim, forward.as_ref());
        let raw: Vec<f64> = col.iter().map(|c| c.re).collect();
        let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        worst = min / max;
        if min >= -opts.tol * max {
            let clamped = raw.iter().filter(|&&v| v < 0.0).count();
            let eigenvalues: Vec<f64> = raw.iter().map(|&v| v.max(0.0)).collect();
            let inverse = planner.plan_fft_inverse(ext);
            return Ok(CirculantEmbedding::assemble(
                grid,
                ext,
                eigenvalues,
                clamped,
                worst,
                attempt,
                inverse,
            ));
        }
        log::debug!(
            "circulant embedding of {grid:?}: min/max eigenvalue {worst:e} at extension {ext}, doubling"
        );
        ext *= 2;
    }
    Err(Error::PaddingExhausted {
        attempts: opts.max_doublings + 1,
        min_ratio: worst,
    })
}

impl CirculantEmbedding {
    fn assemble(
        grid: UniformGrid,
        ext: usize,
        eigenvalues: Vec<f64>,
        clamped: usize,
        min_eigenvalue_ratio: f64,
        doublings: usize,
        fft: Arc<dyn Fft<f64>>,
    ) -> Self {
        let dim = grid.dim();
        let s = eigenvalues.len();
        let sf = s as f64;
        let mut directions = Vec::with_capacity(s);
        for k in 0..s {
            let neg = negate_freq(k, ext, dim);
            let lam = eigenvalues[k];
            if neg == k {
                directions.push(Direction {
                    freq: k,
                    part: Part::Cos,
                    weight: (lam / sf).sqrt(),
                    eigenvalue: lam,
                });
            } else if k < neg {
                let w = (2.0 * lam / sf).sqrt();
                for part in [Part::Cos, Part::Sin] {
                    directions.push(Direction {
                        freq: k,
                        part,
                        weight: w,
                        eigenvalue: lam,
                    });
                }
            }
        }
        debug_assert_eq!(directions.len(), s);
        let mut importance_order: Vec<usize> = (0..s).collect();
        // stable: ties keep ascending frequency order
        importance_order.sort_by(|&a, &b| {
            directions[b]
                .eigenvalue
                .partial_cmp(&directions[a].eigenvalue)
                .unwrap()
        });
        Self {
            grid,
            ext,
            eigenvalues,
            directions,
            importance_order,
            clamped,
            min_eigenvalue_ratio,
            doublings,
            fft,
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn ext_per_axis(&self) -> usize {
        self.ext
    }

    /// Number of standard normals consumed per sample.
    pub fn stochastic_dim(&self) -> usize {
        self.directions.len()
    }

    /// Eigenvalues of the circulant matrix, indexed by frequency.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvalue attached to each input coordinate, in importance order.
    pub fn ordered_eigenvalues(&self) -> Vec<f64> {
        self.importance_order
            .iter()
            .map(|&d| self.directions[d].eigenvalue)
            .collect()
    }

    /// `importance_order[j]` is the basis direction driven by input coordinate `j`.
    pub fn importance_order(&self) -> &[usize] {
        &self.importance_order
    }

    /// Number of slightly negative eigenvalues that were set to zero.
    pub fn clamped_count(&self) -> usize {
        self.clamped
    }

    /// Smallest raw eigenvalue divided by the largest.
    pub fn min_eigenvalue_ratio(&self) -> f64 {
        self.min_eigenvalue_ratio
    }

    pub fn padding_doublings(&self) -> usize {
        self.doublings
    }

    /// Permutes normals given in importance order into basis-direction order.
    pub fn assign_dimensions(&self, y: &[f64]) -> Result<Vec<f64>> {
        let s = self.stochastic_dim();
        if y.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: y.len(),
            });
        }
        let mut out = vec![0.0; s];
        for (j, &d) in self.importance_order.iter().enumerate() {
            out[d] = y[j];
        }
        Ok(out)
    }

    fn basis_value(&self, dir: &Direction, point: usize) -> f64 {
        let dim = self.grid.dim();
        let kf = ext_multi_index(dir.freq, self.ext, dim);
        let xi = self.grid.multi_index(point);
        // integer phase reduced mod ext keeps the angle exact
        let phase = (0..dim).map(|a| kf[a] * xi[a]).sum::<usize>() % self.ext;
        let theta = 2.0 * PI * phase as f64 / self.ext as f64;
        dir.weight
            * match dir.part {
                Part::Cos => theta.cos(),
                Part::Sin => theta.sin(),
            }
    }

    /// Row `i` of the factor `B` (columns in importance order), `Σ = B Bᵀ`.
    pub fn factor_row(&self, i: usize) -> Result<Vec<f64>> {
        let m = self.grid.num_points();
        if i >= m {
            return Err(Error::Index { index: i, len: m });
        }
        Ok(self
            .importance_order
            .iter()
            .map(|&d| self.basis_value(&self.directions[d], i))
            .collect())
    }

    /// `B y` at the physical grid points via one inverse FFT; `y` in direction order.
    pub fn apply_factor_natural(&self, y: &[f64]) -> Result<Vec<f64>> {
        let s = self.stochastic_dim();
        if y.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: y.len(),
            });
        }
        let dim = self.grid.dim();
        let mut w = vec![Complex64::default(); s];
        let mut j = 0;
        while j < s {
            let dir = &self.directions[j];
            let k = dir.freq;
            let neg = negate_freq(k, self.ext, dim);
            if neg == k {
                w[k] = Complex64::new(dir.weight * y[j], 0.0);
                j += 1;
            } else {
                // weight = sqrt(2λ/s); each conjugate half carries sqrt(λ/(2s))
                let half = 0.5 * dir.weight;
                let c = Complex64::new(half * y[j], -half * y[j + 1]);
                w[k] = c;
                w[neg] = c.conj();
                j += 2;
            }
        }
        fft_nd(&mut w, self.ext, dim, self.fft.as_ref());
        let n = self.grid.points_per_axis();
        Ok((0..self.grid.num_points())
            .map(|i| {
                let idx = self.grid.multi_index(i);
                let mut e = [0usize; 3];
                e[..dim].copy_from_slice(&idx[..dim]);
                debug_assert!(idx[..dim].iter().all(|&v| v < n));
                w[ext_flat(&e, self.ext, dim)].re
            })
            .collect())
    }

    /// `B y` with `y` in importance order.
    pub fn apply_factor(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.apply_factor_natural(&self.assign_dimensions(y)?)
    }
}

/// Samples `a = exp(B y + Z̄)` at the grid points; `y` in importance order.
pub fn sample_field(
    e: &CirculantEmbedding,
    zbar: &MeanField,
    y: &[f64],
    level: usize,
) -> Result<FieldRealization> {
    let by = e.apply_factor(y)?;
    let grid = *e.grid();
    let log_values: Vec<f64> = by
        .iter()
        .enumerate()
        .map(|(i, v)| v + zbar.at(&grid.point(i)[..grid.dim()]))
        .collect();
    Ok(FieldRealization::from_log_values(level, grid, log_values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{Matern, MaternParams, WhiteNoise};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn exp_kernel(s2: f64, l: f64) -> Matern {
        Matern::new(MaternParams::new(s2, l, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn two_point_example() {
        let k = exp_kernel(1.0, 1.0);
        let g = UniformGrid::new(1, 2).unwrap();
        let e = build_embedding(&k, g, EmbeddingOptions::default()).unwrap();
        assert_eq!(e.stochastic_dim(), 2);
        assert_eq!(e.padding_doublings(), 0);
        let ev = e.ordered_eigenvalues();
        let em1 = (-1f64).exp();
        // direct 2x2 eigen-decomposition of [[1, e^-1], [e^-1, 1]]
        assert!((ev[0] - (1.0 + em1)).abs() < 1e-14);
        assert!((ev[1] - (1.0 - em1)).abs() < 1e-14);
        let r0 = e.factor_row(0).unwrap();
        let r1 = e.factor_row(1).unwrap();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        assert!((dot(&r0, &r0) - 1.0).abs() < 1e-12);
        assert!((dot(&r1, &r1) - 1.0).abs() < 1e-12);
        assert!((dot(&r0, &r1) - em1).abs() < 1e-12);
    }

    #[test]
    fn white_noise_has_flat_spectrum() {
        let k = WhiteNoise { sigma2: 0.3 };
        let g = UniformGrid::new(2, 4).unwrap();
        let e = build_embedding(&k, g, EmbeddingOptions::default()).unwrap();
        assert_eq!(e.stochastic_dim(), 36);
        assert!(e.eigenvalues().iter().all(|&v| (v - 0.3).abs() < 1e-14));
        for i in 0..g.num_points() {
            for j in 0..g.num_points() {
                let ri = e.factor_row(i).unwrap();
                let rj = e.factor_row(j).unwrap();
                let d: f64 = ri.iter().zip(&rj).map(|(a, b)| a * b).sum();
                let want = if i == j { 0.3 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fft_matches_dense_factor() {
        let k = exp_kernel(0.1, 1.0);
        let g = UniformGrid::new(1, 5).unwrap();
        let e = build_embedding(&k, g, EmbeddingOptions::default()).unwrap();
        let rows: Vec<Vec<f64>> = (0..5).map(|i| e.factor_row(i).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let y: Vec<f64> = (0..e.stochastic_dim())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let fast = e.apply_factor(&y).unwrap();
            for (i, row) in rows.iter().enumerate() {
                let dense: f64 = row.iter().zip(&y).map(|(a, b)| a * b).sum();
                assert!((fast[i] - dense).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_input_gives_mean() {
        let k = exp_kernel(0.1, 1.0);
        let g = UniformGrid::new(2, 3).unwrap();
        let e = build_embedding(&k, g, EmbeddingOptions::default()).unwrap();
        let y = vec![0.0; e.stochastic_dim()];
        let f = sample_field(&e, &MeanField::Constant(0.25), &y, 1).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.25f64.exp()));
        assert!(sample_field(&e, &MeanField::default(), &y[1..], 1).is_err());
    }

    #[test]
    fn importance_order_is_permutation_sorted_by_eigenvalue() {
        let k = exp_kernel(0.1, 0.3);
        let g = UniformGrid::new(2, 5).unwrap();
        let e = build_embedding(&k, g, EmbeddingOptions::default()).unwrap();
        let mut seen = vec![false; e.stochastic_dim()];
        for &d in e.importance_order() {
            assert!(!seen[d]);
            seen[d] = true;
        }
        let ev = e.ordered_eigenvalues();
        assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        let y: Vec<f64> = (0..e.stochastic_dim()).map(|i| i as f64).collect();
        let nat = e.assign_dimensions(&y).unwrap();
        for (j, &d) in e.importance_order().iter().enumerate() {
            assert_eq!(nat[d], y[j]);
        }
    }

    #[test]
    fn smoother_kernel_needs_more_padding() {
        let g = UniformGrid::dyadic(2, 2).unwrap();
        let p1 = Matern::new(MaternParams::new(0.1, 1.0, 0.5).unwrap()).unwrap();
        let p2 = Matern::new(MaternParams::new(0.1, 1.0, 2.5).unwrap()).unwrap();
        let e1 = build_embedding(&p1, g, EmbeddingOptions::default()).unwrap();
        let e2 = build_embedding(&p2, g, EmbeddingOptions::default()).unwrap();
        assert!(e2.stochastic_dim() > e1.stochastic_dim());
    }

    #[test]
    fn padding_exhausted() {
        let k = Matern::new(MaternParams::new(0.1, 1.0, 2.5).unwrap()).unwrap();
        let g = UniformGrid::dyadic(2, 2).unwrap();
        let opts = EmbeddingOptions {
            tol: 1e-13,
            max_doublings: 0,
        };
        assert!(matches!(
            build_embedding(&k, g, opts),
            Err(Error::PaddingExhausted { .. })
        ));
    }
}
