use crate::covariance::{CovarianceKernel, MeanField};
use crate::error::{Error, Result};
use crate::fem::{prolong, FeFunction, FeLevel, PdeLevel, TargetAndControl};
use crate::field::{build_embedding, sample_field, CirculantEmbedding, EmbeddingOptions, FieldRealization, UniformGrid};
use crate::qmc::GeneratingVector;
use crate::rng::splitmix64;
use std::time::Instant;

#[derive(Clone, Copy, Debug)]
pub struct HierarchyOptions {
    /// Finest level `L`.
    pub max_level: usize,
    /// Exponent of the model cost `C_ℓ ∝ h_ℓ^{−κ}`.
    pub kappa: f64,
    /// Seed for the random tail of the generating vector.
    pub extension_seed: u64,
    /// CE grid on level `ℓ` has `2^{ce_offset+ℓ}+1` points per axis.
    pub ce_offset: usize,
    /// FE mesh on level `ℓ` has `2^{fe_offset+ℓ}+1` nodes per axis.
    pub fe_offset: usize,
    pub embedding: EmbeddingOptions,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        Self {
            max_level: 3,
            kappa: 2.0,
            extension_seed: 0,
            ce_offset: 0,
            fe_offset: 2,
            embedding: EmbeddingOptions::default(),
        }
    }
}

/// Everything needed to draw samples on one level.
pub struct HierarchyLevel {
    pub ell: usize,
    pub fe: PdeLevel,
    pub ce_grid: UniformGrid,
    pub embedding: CirculantEmbedding,
    /// Generating vector of length at least `s_ℓ`.
    pub genvec: GeneratingVector,
}

impl HierarchyLevel {
    pub fn stochastic_dim(&self) -> usize {
        self.embedding.stochastic_dim()
    }

    pub fn mesh(&self) -> FeLevel {
        *self.fe.mesh()
    }
}

/// A sample of `q_ℓ − q_{ℓ−1}` (or of `q_ℓ` alone) with its wall time split
/// into field-sampling and finite-element parts.
#[derive(Clone, Debug)]
pub struct TimedSample {
    pub value: FeFunction,
    pub ce_secs: f64,
    pub fe_secs: f64,
}

/// Nested CE grids `(2^ℓ+1)²`, FE meshes `(2^{2+ℓ}+1)²`, one embedding per
/// level and one generating vector per level. Levels share the loaded prefix;
/// where `s_ℓ` exceeds it, the random tail is keyed by the level.
pub struct LevelHierarchy {
    levels: Vec<HierarchyLevel>,
    problem: TargetAndControl,
    mean: MeanField,
    opts: HierarchyOptions,
}

impl LevelHierarchy {
    pub fn build(
        kernel: &dyn CovarianceKernel,
        mean: MeanField,
        problem: TargetAndControl,
        genvec: &GeneratingVector,
        opts: HierarchyOptions,
    ) -> Result<Self> {
        if !(opts.kappa > 0.0) {
            return Err(Error::Domain(format!("kappa must be positive, got {}", opts.kappa)));
        }
        if opts.fe_offset == 0 || opts.ce_offset + opts.max_level > 12 || opts.fe_offset + opts.max_level > 14 {
            return Err(Error::Domain(format!(
                "unsupported grid schedule: ce_offset {}, fe_offset {}, L {}",
                opts.ce_offset, opts.fe_offset, opts.max_level
            )));
        }
        let mut levels = Vec::with_capacity(opts.max_level + 1);
        for ell in 0..=opts.max_level {
            let ce_grid = UniformGrid::dyadic(2, opts.ce_offset + ell)?;
            let embedding = build_embedding(kernel, ce_grid, opts.embedding)?;
            let mesh = FeLevel::with_nodes(ell, (1 << (opts.fe_offset + ell)) + 1)?;
            let seed = splitmix64(opts.extension_seed ^ splitmix64(ell as u64));
            levels.push(HierarchyLevel {
                ell,
                fe: PdeLevel::new(mesh, &problem),
                ce_grid,
                genvec: genvec.extend_vector(embedding.stochastic_dim(), seed),
                embedding,
            });
        }
        for w in levels.windows(2) {
            if w[1].stochastic_dim() < w[0].stochastic_dim() {
                return Err(Error::NestingViolation(format!(
                    "stochastic dimension decreases from level {} to {}",
                    w[0].ell, w[1].ell
                )));
            }
        }
        Ok(Self {
            levels,
            problem,
            mean,
            opts,
        })
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, ell: usize) -> &HierarchyLevel {
        &self.levels[ell]
    }

    pub fn levels(&self) -> &[HierarchyLevel] {
        &self.levels
    }

    pub fn problem(&self) -> &TargetAndControl {
        &self.problem
    }

    pub fn kappa(&self) -> f64 {
        self.opts.kappa
    }

    pub fn options(&self) -> &HierarchyOptions {
        &self.opts
    }

    pub fn finest_mesh(&self) -> FeLevel {
        self.levels[self.max_level()].mesh()
    }

    /// Model cost of one sample in units of one finest-level solve:
    /// `(h_ℓ^{−κ} + h_{ℓ−1}^{−κ}) / h_L^{−κ}`, the second term only if coupled.
    pub fn model_cost(&self, ell: usize, coupled: bool) -> f64 {
        let l = self.max_level() as f64;
        let mut c = (self.opts.kappa * (ell as f64 - l)).exp2();
        if coupled && ell > 0 {
            c += (self.opts.kappa * (ell as f64 - 1.0 - l)).exp2();
        }
        c
    }

    /// Lognormal field on level `ℓ`'s CE grid for normals `y` in importance order.
    pub fn field(&self, ell: usize, y: &[f64]) -> Result<FieldRealization> {
        sample_field(&self.levels[ell].embedding, &self.mean, y, ell)
    }

    /// Adjoint solution `q_h` on FE level `ℓ` for a given coefficient.
    pub fn adjoint(&self, ell: usize, a: &FieldRealization) -> Result<FeFunction> {
        Ok(self.levels[ell].fe.solve(a)?.adjoint)
    }

    /// `q_ℓ − q_{ℓ−1}` for one fine-level coefficient; the coarse solve uses
    /// the coefficient restricted to the coarse CE grid.
    pub fn coupled_difference(&self, ell: usize, a: &FieldRealization) -> Result<FeFunction> {
        let q = self.adjoint(ell, a)?;
        if ell == 0 {
            return Ok(q);
        }
        let coarse = a.restrict_to_coarse(&self.levels[ell - 1].ce_grid)?;
        let qc = self.adjoint(ell - 1, &coarse)?;
        q.sub(&prolong(&qc, *q.mesh())?)
    }

    /// `q_ℓ − q_{ℓ−1}` for normals `y` of length `s_ℓ` (`q_{−1} = 0`).
    pub fn coupled_sample(&self, ell: usize, y: &[f64]) -> Result<FeFunction> {
        Ok(self.timed_sample(ell, y, true)?.value)
    }

    /// Coupled difference, or the plain `q_ℓ` when `coupled` is false.
    pub fn timed_sample(&self, ell: usize, y: &[f64], coupled: bool) -> Result<TimedSample> {
        let t0 = Instant::now();
        let a = self.field(ell, y)?;
        let coarse = if coupled && ell > 0 {
            Some(a.restrict_to_coarse(&self.levels[ell - 1].ce_grid)?)
        } else {
            None
        };
        let ce_secs = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let q = self.adjoint(ell, &a)?;
        let value = match coarse {
            Some(c) => {
                let qc = self.adjoint(ell - 1, &c)?;
                q.sub(&prolong(&qc, *q.mesh())?)?
            }
            None => q,
        };
        Ok(TimedSample {
            value,
            ce_secs,
            fe_secs: t1.elapsed().as_secs_f64(),
        })
    }
}
