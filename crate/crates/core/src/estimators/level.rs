use super::hierarchy::{LevelHierarchy, TimedSample};
use crate::error::{Error, Result};
use crate::fem::{l2_inner_values, FeFunction, FeLevel};
use crate::qmc::{clamp_unit, inv_norm_cdf, lattice_point_into, ShiftSet};
use crate::rng::{keyed_rng, splitmix64, Stream};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Below this many points per shift a variance estimate is flagged.
pub const LOW_CONFIDENCE_N: usize = 8;

// samples are evaluated in fixed-size batches so memory stays bounded and
// the reduction order never depends on the thread count
const BATCH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    Qmc,
    Mlmc,
    Mlqmc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mc, Method::Qmc, Method::Mlmc, Method::Mlqmc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Qmc => "qmc",
            Method::Mlmc => "mlmc",
            Method::Mlqmc => "mlqmc",
        }
    }

    pub fn is_multilevel(self) -> bool {
        matches!(self, Method::Mlmc | Method::Mlqmc)
    }

    pub fn is_qmc(self) -> bool {
        matches!(self, Method::Qmc | Method::Mlqmc)
    }

    fn tag(self) -> u64 {
        match self {
            Method::Mc => 11,
            Method::Qmc => 12,
            Method::Mlmc => 13,
            Method::Mlqmc => 14,
        }
    }

    /// Seed of this method's random streams.
    pub fn stream_seed(self, master: u64) -> u64 {
        splitmix64(master ^ splitmix64(self.tag()))
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

enum Accumulator {
    /// Per-shift sums over lattice points `1..=n`.
    Lattice { shifts: ShiftSet, sums: Vec<Vec<f64>> },
    /// Running mean and `Σ ‖Y_i − Ȳ‖²_M` (Welford, in sample order).
    Iid { mean: Vec<f64>, m2: f64 },
}

/// Running estimator of `E[q_ℓ − q_{ℓ−1}]` on one level.
///
/// For lattice rules `n` is the number of points per shift and the variance
/// is `Σ_r ‖Q_r − Q̄‖²_M / (R(R−1))`; for i.i.d. sampling `n` counts all samples
/// and the variance is `Σ_i ‖Y_i − Ȳ‖²_M / (n(n−1))`. Norms use the consistent
/// mass matrix of the level's mesh.
pub struct LevelEstimator {
    method: Method,
    seed: u64,
    ell: usize,
    coupled: bool,
    mesh: FeLevel,
    n: usize,
    acc: Accumulator,
    variance: f64,
    ce_secs: f64,
    fe_secs: f64,
}

/// Snapshot of a level estimator.
#[derive(Clone, Debug)]
pub struct LevelEstimate {
    pub ell: usize,
    pub coupled: bool,
    pub n: usize,
    pub r: usize,
    pub variance: f64,
    pub mean: FeFunction,
    pub per_shift_means: Vec<FeFunction>,
    pub ce_secs: f64,
    pub fe_secs: f64,
}

impl LevelEstimate {
    pub fn low_confidence(&self) -> bool {
        if self.r > 1 {
            self.n < LOW_CONFIDENCE_N
        } else {
            self.n < LOW_CONFIDENCE_N * 2
        }
    }

    /// Number of PDE sample evaluations, `R·N`.
    pub fn evaluations(&self) -> usize {
        self.r * self.n
    }
}

impl LevelEstimator {
    /// An empty estimator. `shifts` is ignored for i.i.d. methods.
    pub fn new(
        hier: &LevelHierarchy,
        method: Method,
        master_seed: u64,
        ell: usize,
        coupled: bool,
        shifts: usize,
    ) -> Result<Self> {
        if ell > hier.max_level() {
            return Err(Error::Index {
                index: ell,
                len: hier.max_level() + 1,
            });
        }
        let seed = method.stream_seed(master_seed);
        let mesh = hier.level(ell).mesh();
        let acc = if method.is_qmc() {
            if shifts < 2 {
                return Err(Error::InsufficientShifts(shifts));
            }
            let dim = hier.level(ell).stochastic_dim();
            Accumulator::Lattice {
                shifts: ShiftSet::generate(seed, ell, shifts, dim),
                sums: vec![vec![0.0; mesh.num_nodes()]; shifts],
            }
        } else {
            Accumulator::Iid {
                mean: vec![0.0; mesh.num_nodes()],
                m2: 0.0,
            }
        };
        Ok(Self {
            method,
            seed,
            ell,
            coupled,
            mesh,
            n: 0,
            acc,
            variance: f64::INFINITY,
            ce_secs: 0.0,
            fe_secs: 0.0,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shifts(&self) -> usize {
        match &self.acc {
            Accumulator::Lattice { shifts, .. } => shifts.len(),
            Accumulator::Iid { .. } => 1,
        }
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn is_coupled(&self) -> bool {
        self.coupled
    }

    /// Grows the point set to `n_new` per shift (lattice: `n_new` must be
    /// `2n` once started, so previous points are reused).
    pub fn extend_to(&mut self, hier: &LevelHierarchy, n_new: usize) -> Result<()> {
        if n_new <= self.n {
            return Ok(());
        }
        match self.acc {
            Accumulator::Lattice { .. } => {
                if self.n > 0 && n_new != 2 * self.n {
                    return Err(Error::Domain(format!(
                        "embedded lattice can only double: {} -> {n_new}",
                        self.n
                    )));
                }
                self.extend_lattice(hier, n_new)?;
            }
            Accumulator::Iid { .. } => self.extend_iid(hier, n_new)?,
        }
        self.n = n_new;
        self.update_variance();
        Ok(())
    }

    /// Doubles `n` (or starts at `warmup`).
    pub fn double(&mut self, hier: &LevelHierarchy, warmup: usize) -> Result<()> {
        let target = if self.n == 0 { warmup } else { 2 * self.n };
        self.extend_to(hier, target)
    }

    fn sample_batch(
        &self,
        hier: &LevelHierarchy,
        ids: &[usize],
        point: &(impl Fn(usize) -> Result<Vec<f64>> + Sync),
    ) -> Result<Vec<TimedSample>> {
        ids.par_iter()
            .map(|&i| {
                let y = point(i)?;
                hier.timed_sample(self.ell, &y, self.coupled)
                    .map_err(|e| e.in_sample(self.ell, i))
            })
            .collect()
    }

    fn extend_lattice(&mut self, hier: &LevelHierarchy, n_new: usize) -> Result<()> {
        let s = hier.level(self.ell).stochastic_dim();
        let z = &hier.level(self.ell).genvec.entries()[..s];
        // points of the n-point rule are the even indices of the 2n-point rule
        let ids: Vec<usize> = if self.n == 0 {
            (1..=n_new).collect()
        } else {
            (1..=n_new).step_by(2).collect()
        };
        let Accumulator::Lattice { shifts, .. } = &self.acc else {
            unreachable!()
        };
        let shifts = shifts.clone();
        for r in 0..shifts.len() {
            let delta = shifts.get(r);
            let point = |i: usize| -> Result<Vec<f64>> {
                let mut x = vec![0.0; s];
                lattice_point_into(z, n_new as u64, i as u64, delta, &mut x)?;
                Ok(x.into_iter().map(|v| inv_norm_cdf(clamp_unit(v))).collect())
            };
            for chunk in ids.chunks(BATCH) {
                let batch = self.sample_batch(hier, chunk, &point)?;
                let Accumulator::Lattice { sums, .. } = &mut self.acc else {
                    unreachable!()
                };
                for t in batch {
                    for (a, b) in sums[r].iter_mut().zip(t.value.values()) {
                        *a += b;
                    }
                    self.ce_secs += t.ce_secs;
                    self.fe_secs += t.fe_secs;
                }
            }
        }
        Ok(())
    }

    fn extend_iid(&mut self, hier: &LevelHierarchy, n_new: usize) -> Result<()> {
        let s = hier.level(self.ell).stochastic_dim();
        let (seed, ell, tag) = (self.seed, self.ell as u64, self.coupled as u64);
        let normals = |i: usize| -> Result<Vec<f64>> {
            let mut rng = keyed_rng(seed, Stream::Normals, &[ell, tag, i as u64]);
            Ok((0..s).map(|_| StandardNormal.sample(&mut rng)).collect())
        };
        let ids: Vec<usize> = (self.n..n_new).collect();
        for chunk in ids.chunks(BATCH) {
            let batch = self.sample_batch(hier, chunk, &normals)?;
            let Accumulator::Iid { mean, m2 } = &mut self.acc else {
                unreachable!()
            };
            for (k, t) in batch.into_iter().enumerate() {
                let count = (chunk[0] + k + 1) as f64;
                let y = t.value.values();
                let before: Vec<f64> = y.iter().zip(mean.iter()).map(|(a, b)| a - b).collect();
                for (m, d) in mean.iter_mut().zip(&before) {
                    *m += d / count;
                }
                let after: Vec<f64> = y.iter().zip(mean.iter()).map(|(a, b)| a - b).collect();
                *m2 += l2_inner_values(self.mesh, &before, &after);
                self.ce_secs += t.ce_secs;
                self.fe_secs += t.fe_secs;
            }
        }
        Ok(())
    }

    fn update_variance(&mut self) {
        let n = self.n as f64;
        self.variance = match &self.acc {
            Accumulator::Lattice { sums, .. } => {
                let r = sums.len() as f64;
                let means: Vec<Vec<f64>> = sums
                    .iter()
                    .map(|s| s.iter().map(|v| v / n).collect())
                    .collect();
                let grand = grand_mean(&means);
                let ss: f64 = means
                    .iter()
                    .map(|m| {
                        let d: Vec<f64> = m.iter().zip(&grand).map(|(a, b)| a - b).collect();
                        l2_inner_values(self.mesh, &d, &d)
                    })
                    .sum();
                (ss / (r * (r - 1.0))).max(0.0)
            }
            Accumulator::Iid { m2, .. } => {
                if self.n < 2 {
                    f64::INFINITY
                } else {
                    (m2 / (n * (n - 1.0))).max(0.0)
                }
            }
        };
    }

    pub fn estimate(&self) -> LevelEstimate {
        let n = self.n.max(1) as f64;
        let (mean, per_shift_means, r) = match &self.acc {
            Accumulator::Lattice { sums, .. } => {
                let means: Vec<Vec<f64>> = sums
                    .iter()
                    .map(|s| s.iter().map(|v| v / n).collect())
                    .collect();
                let grand = grand_mean(&means);
                let per = means
                    .into_iter()
                    .map(|m| FeFunction::from_values(self.mesh, m).expect("mesh size"))
                    .collect();
                (grand, per, sums.len())
            }
            Accumulator::Iid { mean, .. } => (mean.clone(), Vec::new(), 1),
        };
        LevelEstimate {
            ell: self.ell,
            coupled: self.coupled,
            n: self.n,
            r,
            variance: self.variance,
            mean: FeFunction::from_values(self.mesh, mean).expect("mesh size"),
            per_shift_means,
            ce_secs: self.ce_secs,
            fe_secs: self.fe_secs,
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }
}

fn grand_mean(means: &[Vec<f64>]) -> Vec<f64> {
    let r = means.len() as f64;
    let mut g = vec![0.0; means[0].len()];
    for m in means {
        for (a, b) in g.iter_mut().zip(m) {
            *a += b;
        }
    }
    g.iter_mut().for_each(|v| *v /= r);
    g
}

/// Single level-`ℓ` QMC estimate with `n` lattice points per shift.
pub fn qmc_level_estimate(
    hier: &LevelHierarchy,
    master_seed: u64,
    ell: usize,
    n: usize,
    shifts: usize,
) -> Result<LevelEstimate> {
    let mut est = LevelEstimator::new(hier, Method::Mlqmc, master_seed, ell, true, shifts)?;
    est.extend_to(hier, n)?;
    Ok(est.estimate())
}

/// Single level-`ℓ` Monte Carlo estimate with `n` i.i.d. samples.
pub fn mc_level_estimate(
    hier: &LevelHierarchy,
    master_seed: u64,
    ell: usize,
    n: usize,
) -> Result<LevelEstimate> {
    let mut est = LevelEstimator::new(hier, Method::Mlmc, master_seed, ell, true, 1)?;
    est.extend_to(hier, n)?;
    Ok(est.estimate())
}
