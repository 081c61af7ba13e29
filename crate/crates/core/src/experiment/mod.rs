//! Config-driven experiments: gradient runs, variance-decay studies, cost
//! curves and gradient-field dumps, each writing its artifacts atomically.
mod config;
mod io;

pub use config::{
    EstimatorConfig, GeometryConfig, OutputConfig, Preset, ProblemConfig, QmcConfig, RunConfig,
    VarianceStudyConfig, OUT_DIR_ENV,
};
pub use io::{read_nodal_text, write_atomic, write_csv, write_json, write_nodal_csv, write_nodal_text};

use crate::covariance::{Matern, MeanField};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_gradient, level_cost_profile, loglog_slope, EstimatorOptions, GradientEstimate,
    HierarchyOptions, LevelCost, LevelEstimator, LevelHierarchy, Manifest, Method,
};
use crate::fem::FeFunction;
use crate::field::EmbeddingOptions;
use crate::qmc::{GeneratingVector, DEFAULT_N_MAX, DEFAULT_N_MIN};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Manifest of one subcommand invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub config: RunConfig,
    pub runs: Vec<Manifest>,
}

impl RunManifest {
    pub fn without_timing(&self) -> RunManifest {
        RunManifest {
            runs: self.runs.iter().map(Manifest::without_timing).collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub eps: f64,
    pub method: Method,
    pub rmse_quadrature: f64,
    /// Model cost in finest-solve units.
    pub normalized_cost: f64,
    /// Timing column: sampling time over the measured finest-sample time.
    pub measured_cost: Option<f64>,
}

impl RunRow {
    fn of(m: &Manifest) -> Self {
        Self {
            eps: m.eps,
            method: m.method,
            rmse_quadrature: m.rmse_quadrature,
            normalized_cost: m.model_cost,
            measured_cost: m.timing.measured_cost,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub ell: usize,
    pub n: usize,
    pub r: usize,
    /// `R·V_ℓ`, independent of the number of shifts.
    pub rv: f64,
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub ell: usize,
    pub slope: f64,
    pub n_from: usize,
    pub n_to: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub method: Method,
    /// `cost ∝ ε^{−exponent}`, least squares over the ε sweep.
    pub exponent: f64,
}

#[derive(Clone, Debug)]
pub struct VarianceStudy {
    pub rows: Vec<VarianceRow>,
    pub slopes: Vec<SlopeRow>,
}

impl VarianceStudy {
    /// `R·V_ℓ` at `N` points per shift.
    pub fn rv(&self, ell: usize, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.ell == ell && r.n == n).map(|r| r.rv)
    }

    pub fn slope(&self, ell: usize) -> Option<f64> {
        self.slopes.iter().find(|s| s.ell == ell).map(|s| s.slope)
    }
}

#[derive(Clone, Debug)]
pub struct CostCurve {
    pub rows: Vec<RunRow>,
    pub exponents: Vec<ExponentRow>,
    pub level_costs: Vec<LevelCost>,
    pub manifest: RunManifest,
}

impl CostCurve {
    pub fn exponent(&self, method: Method) -> Option<f64> {
        self.exponents.iter().find(|e| e.method == method).map(|e| e.exponent)
    }

    /// Costs of `method` in sweep order (largest ε first).
    pub fn costs(&self, method: Method) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.normalized_cost)
            .collect()
    }
}

/// A configuration with its level hierarchy, built once and shared by every
/// run of the experiment.
pub struct Experiment {
    config: RunConfig,
    hier: LevelHierarchy,
    out_dir: PathBuf,
}

impl Experiment {
    /// Builds the hierarchy; artifacts go to the config's output directory.
    pub fn new(config: RunConfig) -> Result<Self> {
        let out = config.resolved_output_dir();
        Self::with_output(config, out)
    }

    pub fn with_output(config: RunConfig, out_dir: impl Into<PathBuf>) -> Result<Self> {
        config.validate()?;
        let q = &config.qmc;
        let (n_min, n_max) = (q.n_min.unwrap_or(DEFAULT_N_MIN), q.n_max.unwrap_or(DEFAULT_N_MAX));
        let genvec = match &q.generating_vector {
            Some(p) => GeneratingVector::from_file(p, n_min, n_max)?,
            None => GeneratingVector::bundled(),
        };
        let kernel = Matern::new(config.problem.matern()).map_err(|e| Error::Config(e.to_string()))?;
        let opts = HierarchyOptions {
            max_level: config.geometry.max_level,
            kappa: config.estimator.kappa,
            extension_seed: q.extension_seed,
            ce_offset: config.geometry.ce_offset,
            fe_offset: config.geometry.fe_offset,
            embedding: EmbeddingOptions::default(),
        };
        let hier = LevelHierarchy::build(
            &kernel,
            MeanField::Constant(config.problem.mean),
            config.objective.clone(),
            &genvec,
            opts,
        )?;
        Ok(Self {
            config,
            hier,
            out_dir: out_dir.into(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn hierarchy(&self) -> &LevelHierarchy {
        &self.hier
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn estimator_options(&self) -> EstimatorOptions {
        let e = &self.config.estimator;
        EstimatorOptions {
            master_seed: self.config.master_seed,
            shifts: self.config.qmc.shifts,
            warmup: e.warmup,
            mc_warmup: e.mc_warmup,
            cost_cap: e.cost_cap,
            reference_secs: None,
            config_hash: self.config.hash(),
        }
    }

    fn manifest(&self, command: &str, runs: Vec<Manifest>) -> RunManifest {
        RunManifest {
            command: command.into(),
            config_hash: self.config.hash(),
            master_seed: self.config.master_seed,
            config: self.config.clone(),
            runs,
        }
    }

    fn level_costs(&self) -> Result<Vec<LevelCost>> {
        level_cost_profile(&self.hier, self.config.estimator.timing_reps, self.config.master_seed)
    }

    /// Runs `method` at `eps` with measured costs normalized by `reference`.
    pub fn estimate(&self, method: Method, eps: f64, reference: Option<f64>) -> Result<GradientEstimate> {
        let opts = EstimatorOptions {
            reference_secs: reference,
            ..self.estimator_options()
        };
        log::info!("{} at eps {eps:e}", method.name());
        let est = estimate_gradient(&self.hier, method, eps, &opts)?;
        log::info!(
            "{} at eps {eps:e}: rmse {:e}, cost {:.3}",
            method.name(),
            est.rmse_quadrature,
            est.cost_total
        );
        Ok(est)
    }

    /// The configured method at every ε. Writes `run_manifest.json`,
    /// `run.csv` and the gradient at the smallest ε.
    pub fn run(&self) -> Result<(RunManifest, GradientEstimate)> {
        let reference = self.level_costs()?.last().map(LevelCost::total_secs);
        let method = self.config.estimator.method;
        let mut runs = Vec::new();
        let mut last = None;
        for &eps in &self.config.estimator.eps {
            let est = self.estimate(method, eps, reference)?;
            runs.push(est.manifest.clone());
            last = Some(est);
        }
        let last = last.expect("eps list is nonempty");
        let manifest = self.manifest("run", runs);
        let rows: Vec<RunRow> = manifest.runs.iter().map(RunRow::of).collect();
        write_csv(&self.out_dir.join("run.csv"), &rows)?;
        self.write_fields(&last)?;
        write_json(&self.out_dir.join("run_manifest.json"), &manifest)?;
        Ok((manifest, last))
    }

    /// `R·V_ℓ` of the lattice estimator on every level over a dyadic sweep of
    /// `N`, with least-squares slopes. Writes `variance_decay.csv` and
    /// `variance_slopes.csv`.
    pub fn variance_study(&self) -> Result<VarianceStudy> {
        let vs = &self.config.variance_study;
        let shifts = self.config.qmc.shifts;
        let mut rows = Vec::new();
        let mut slopes = Vec::new();
        for ell in 0..=self.hier.max_level() {
            let mut est =
                LevelEstimator::new(&self.hier, Method::Mlqmc, self.config.master_seed, ell, true, shifts)?;
            let mut level_rows = Vec::new();
            for k in vs.n_min_log2..=vs.n_max_log2 {
                est.extend_to(&self.hier, 1 << k)?;
                level_rows.push(VarianceRow {
                    ell,
                    n: est.n(),
                    r: shifts,
                    rv: shifts as f64 * est.variance(),
                    variance: est.variance(),
                });
            }
            log::info!("variance study: level {ell} done");
            let (lo, hi) = (1usize << vs.fit_min_log2, 1usize << vs.fit_max_log2);
            let fit: Vec<&VarianceRow> = level_rows
                .iter()
                .filter(|r| r.n >= lo && r.n <= hi && r.rv > 0.0)
                .collect();
            if fit.len() >= 2 {
                let x: Vec<f64> = fit.iter().map(|r| r.n as f64).collect();
                let y: Vec<f64> = fit.iter().map(|r| r.rv).collect();
                slopes.push(SlopeRow {
                    ell,
                    slope: loglog_slope(&x, &y),
                    n_from: fit[0].n,
                    n_to: fit[fit.len() - 1].n,
                });
            }
            rows.extend(level_rows);
        }
        write_csv(&self.out_dir.join("variance_decay.csv"), &rows)?;
        write_csv(&self.out_dir.join("variance_slopes.csv"), &slopes)?;
        Ok(VarianceStudy { rows, slopes })
    }

    /// Every configured method at every ε on the shared hierarchy, plus the
    /// measured per-level costs. Writes `cost_curve.csv`,
    /// `cost_exponents.csv`, `level_cost.csv` and `cost_manifest.json`.
    ///
    /// Finished runs are checkpointed; an interrupted study restarted with the
    /// same config resumes after the last finished run.
    pub fn cost_curve(&self) -> Result<CostCurve> {
        let level_costs = self.level_costs()?;
        write_csv(&self.out_dir.join("level_cost.csv"), &level_costs)?;
        let reference = level_costs.last().map(LevelCost::total_secs);

        let checkpoint = self.out_dir.join(".cost_curve.checkpoint.json");
        let mut runs: Vec<Manifest> = match std::fs::read_to_string(&checkpoint) {
            Ok(text) => match serde_json::from_str::<RunManifest>(&text) {
                Ok(m) if m.config_hash == self.config.hash() => {
                    log::info!("resuming cost curve with {} finished runs", m.runs.len());
                    m.runs
                }
                _ => Vec::new(),
            },
            Err(_) => Vec::new(),
        };
        for &method in &self.config.estimator.methods {
            for &eps in &self.config.estimator.eps {
                if runs.iter().any(|m| m.method == method && m.eps == eps) {
                    continue;
                }
                runs.push(self.estimate(method, eps, reference)?.manifest);
                write_json(&checkpoint, &self.manifest("cost-curve", runs.clone()))?;
            }
        }
        // checkpointed runs may come back in a different order
        let order = |m: &Manifest| {
            let e = &self.config.estimator;
            (
                e.methods.iter().position(|&x| x == m.method),
                e.eps.iter().position(|&x| x == m.eps),
            )
        };
        runs.sort_by_key(order);

        let rows: Vec<RunRow> = runs.iter().map(RunRow::of).collect();
        let exponents: Vec<ExponentRow> = self
            .config
            .estimator
            .methods
            .iter()
            .filter_map(|&method| {
                let (x, y): (Vec<f64>, Vec<f64>) = rows
                    .iter()
                    .filter(|r| r.method == method)
                    .map(|r| (1.0 / r.eps, r.normalized_cost))
                    .unzip();
                (x.len() >= 2).then(|| ExponentRow {
                    method,
                    exponent: loglog_slope(&x, &y),
                })
            })
            .collect();
        let manifest = self.manifest("cost-curve", runs);
        write_csv(&self.out_dir.join("cost_curve.csv"), &rows)?;
        write_csv(&self.out_dir.join("cost_exponents.csv"), &exponents)?;
        write_json(&self.out_dir.join("cost_manifest.json"), &manifest)?;
        let _ = std::fs::remove_file(&checkpoint);
        Ok(CostCurve {
            rows,
            exponents,
            level_costs,
            manifest,
        })
    }

    /// The configured method at the smallest ε; writes the gradient, mean
    /// adjoint, target and control fields.
    pub fn dump_gradient(&self) -> Result<(RunManifest, GradientEstimate)> {
        let method = self.config.estimator.method;
        let eps = *self.config.estimator.eps.last().expect("eps list is nonempty");
        let est = self.estimate(method, eps, None)?;
        let manifest = self.manifest("dump-gradient", vec![est.manifest.clone()]);
        self.write_fields(&est)?;
        write_json(&self.out_dir.join("gradient_manifest.json"), &manifest)?;
        Ok((manifest, est))
    }

    fn write_fields(&self, est: &GradientEstimate) -> Result<()> {
        let mesh = self.hier.finest_mesh();
        let p = &self.config.objective;
        let g = FeFunction::interpolate(mesh, |x| p.g.eval(x));
        let z = FeFunction::interpolate(mesh, |x| p.z.eval(x));
        let d = &self.out_dir;
        write_nodal_text(&d.join("gradient.txt"), &est.gradient, "gradient E[q] + alpha z")?;
        write_nodal_csv(&d.join("gradient.csv"), &est.gradient)?;
        write_nodal_text(&d.join("mean_adjoint.txt"), &est.mean_q, "mean adjoint E[q]")?;
        write_nodal_csv(&d.join("target.csv"), &g)?;
        write_nodal_csv(&d.join("control.csv"), &z)?;
        Ok(())
    }
}

/// Loads `path` (laid over `preset` if given) and returns the configuration.
pub fn load_config(path: Option<&Path>, preset: Option<Preset>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p, preset),
        None => Ok(RunConfig::preset(preset.unwrap_or(Preset::Problem1))),
    }
}

pub fn run_experiment(config_path: &Path) -> Result<RunManifest> {
    Ok(Experiment::new(RunConfig::load(config_path, None)?)?.run()?.0)
}

pub fn variance_study(config_path: &Path) -> Result<VarianceStudy> {
    Experiment::new(RunConfig::load(config_path, None)?)?.variance_study()
}

pub fn cost_curve(config_path: &Path) -> Result<CostCurve> {
    Experiment::new(RunConfig::load(config_path, None)?)?.cost_curve()
}
