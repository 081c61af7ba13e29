use super::allocation::{allocate_samples, AllocationTrace, LevelSampler};
use super::hierarchy::LevelHierarchy;
use super::level::{LevelEstimate, LevelEstimator, Method};
use crate::error::Result;
use crate::fem::{prolong, FeFunction};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorOptions {
    pub master_seed: u64,
    /// Random shifts `R` for the lattice methods.
    pub shifts: usize,
    /// Initial points per shift for the lattice methods.
    pub warmup: usize,
    /// Initial samples for the i.i.d. methods.
    pub mc_warmup: usize,
    /// Abort once this many finest-solve equivalents (model cost) are spent.
    pub cost_cap: Option<f64>,
    /// Measured seconds of one finest-level sample, for the measured ledger.
    pub reference_secs: Option<f64>,
    pub config_hash: String,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            master_seed: 0,
            shifts: 10,
            warmup: 2,
            mc_warmup: 20,
            cost_cap: None,
            reference_secs: None,
            config_hash: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub ell: usize,
    pub coupled: bool,
    pub stochastic_dim: usize,
    pub n: usize,
    pub r: usize,
    pub variance: f64,
    pub low_confidence: bool,
    /// Model cost of one sample, in finest-solve units.
    pub model_cost: f64,
}

/// Wall-clock figures; these differ between otherwise identical runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_secs: f64,
    pub ce_secs: Vec<f64>,
    pub fe_secs: Vec<f64>,
    /// Total sampling time over the reference finest-sample time.
    pub measured_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub method: Method,
    pub eps: f64,
    pub master_seed: u64,
    pub stream_seed: u64,
    pub extension_seed: u64,
    pub config_hash: String,
    pub max_level: usize,
    pub kappa: f64,
    pub levels: Vec<LevelRecord>,
    pub doubled: Vec<usize>,
    pub rmse_quadrature: f64,
    /// `Σ R_ℓ N_ℓ C_ℓ` with the model cost, in finest-solve units.
    pub model_cost: f64,
    pub timing: Timing,
}

impl Manifest {
    /// The manifest with all timing fields cleared.
    pub fn without_timing(&self) -> Manifest {
        Manifest {
            timing: Timing::default(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct GradientEstimate {
    /// Estimate of `E[q]` on the finest mesh.
    pub mean_q: FeFunction,
    /// `mean_q + α z`.
    pub gradient: FeFunction,
    pub rmse_quadrature: f64,
    pub cost_total: f64,
    pub levels: Vec<LevelEstimate>,
    pub trace: AllocationTrace,
    pub manifest: Manifest,
}

struct Run<'a> {
    hier: &'a LevelHierarchy,
    terms: Vec<LevelEstimator>,
    costs: Vec<f64>,
}

impl LevelSampler for Run<'_> {
    fn num_levels(&self) -> usize {
        self.terms.len()
    }

    fn variance(&self, ell: usize) -> f64 {
        self.terms[ell].variance()
    }

    fn samples(&self, ell: usize) -> usize {
        self.terms[ell].n()
    }

    fn cost_per_sample(&self, ell: usize) -> f64 {
        self.costs[ell]
    }

    fn spent(&self) -> f64 {
        self.terms
            .iter()
            .zip(&self.costs)
            .map(|(t, c)| (t.n() * t.shifts()) as f64 * c)
            .sum()
    }

    fn double(&mut self, ell: usize) -> Result<()> {
        self.terms[ell].double(self.hier, 1)
    }
}

/// Runs `method` to tolerance `eps` on the hierarchy.
///
/// Multilevel methods estimate every `E[q_ℓ − q_{ℓ−1}]`, `ℓ = 0..L`; the single
/// level methods estimate `E[q_L]` directly. Samples are allocated greedily
/// until the summed variance estimate is at most `ε²`.
pub fn estimate_gradient(
    hier: &LevelHierarchy,
    method: Method,
    eps: f64,
    opts: &EstimatorOptions,
) -> Result<GradientEstimate> {
    let start = Instant::now();
    let big_l = hier.max_level();
    let terms: Vec<(usize, bool)> = if method.is_multilevel() {
        (0..=big_l).map(|l| (l, true)).collect()
    } else {
        vec![(big_l, false)]
    };
    let warmup = if method.is_qmc() {
        opts.warmup
    } else {
        opts.mc_warmup
    };
    let mut run = Run {
        hier,
        terms: Vec::with_capacity(terms.len()),
        costs: terms.iter().map(|&(l, c)| hier.model_cost(l, c)).collect(),
    };
    for &(ell, coupled) in &terms {
        let mut est = LevelEstimator::new(hier, method, opts.master_seed, ell, coupled, opts.shifts)?;
        est.extend_to(hier, warmup.max(1))?;
        run.terms.push(est);
    }
    let trace = allocate_samples(&mut run, eps, opts.cost_cap)?;
    let model_cost = run.spent();

    let fine = hier.finest_mesh();
    let levels: Vec<LevelEstimate> = run.terms.iter().map(|t| t.estimate()).collect();
    let mut mean_q = FeFunction::zeros(fine);
    for est in &levels {
        mean_q.axpy(1.0, &prolong(&est.mean, fine)?)?;
    }
    let problem = hier.problem();
    let z = FeFunction::interpolate(fine, |x| problem.z.eval(x));
    let mut gradient = mean_q.clone();
    gradient.axpy(problem.alpha, &z)?;
    let total_var: f64 = levels.iter().map(|e| e.variance).sum();

    let ce_secs: Vec<f64> = levels.iter().map(|e| e.ce_secs).collect();
    let fe_secs: Vec<f64> = levels.iter().map(|e| e.fe_secs).collect();
    let sampling: f64 = ce_secs.iter().sum::<f64>() + fe_secs.iter().sum::<f64>();
    let manifest = Manifest {
        method,
        eps,
        master_seed: opts.master_seed,
        stream_seed: method.stream_seed(opts.master_seed),
        extension_seed: hier.options().extension_seed,
        config_hash: opts.config_hash.clone(),
        max_level: big_l,
        kappa: hier.kappa(),
        levels: levels
            .iter()
            .zip(&run.costs)
            .map(|(e, &c)| LevelRecord {
                ell: e.ell,
                coupled: e.coupled,
                stochastic_dim: hier.level(e.ell).stochastic_dim(),
                n: e.n,
                r: e.r,
                variance: e.variance,
                low_confidence: e.low_confidence(),
                model_cost: c,
            })
            .collect(),
        doubled: trace.doubled.clone(),
        rmse_quadrature: total_var.sqrt(),
        model_cost,
        timing: Timing {
            wall_secs: start.elapsed().as_secs_f64(),
            ce_secs,
            fe_secs,
            measured_cost: opts.reference_secs.map(|r| sampling / r),
        },
    };
    Ok(GradientEstimate {
        mean_q,
        gradient,
        rmse_quadrature: total_var.sqrt(),
        cost_total: model_cost,
        levels,
        trace,
        manifest,
    })
}

pub fn mlqmc_gradient(hier: &LevelHierarchy, eps: f64, opts: &EstimatorOptions) -> Result<GradientEstimate> {
    estimate_gradient(hier, Method::Mlqmc, eps, opts)
}

pub fn mlmc_gradient(hier: &LevelHierarchy, eps: f64, opts: &EstimatorOptions) -> Result<GradientEstimate> {
    estimate_gradient(hier, Method::Mlmc, eps, opts)
}

pub fn qmc_single_level(hier: &LevelHierarchy, eps: f64, opts: &EstimatorOptions) -> Result<GradientEstimate> {
    estimate_gradient(hier, Method::Qmc, eps, opts)
}

pub fn mc_single_level(hier: &LevelHierarchy, eps: f64, opts: &EstimatorOptions) -> Result<GradientEstimate> {
    estimate_gradient(hier, Method::Mc, eps, opts)
}
