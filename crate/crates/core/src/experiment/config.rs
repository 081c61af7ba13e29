use crate::covariance::MaternParams;
use crate::error::{Error, Result};
use crate::estimators::Method;
use crate::fem::TargetAndControl;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Environment variable that overrides `output.dir`.
pub const OUT_DIR_ENV: &str = "MLQMC_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Problem1,
    Problem2,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Problem1 => "problem1",
            Preset::Problem2 => "problem2",
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            Preset::Problem1 => 0.5,
            Preset::Problem2 => 2.5,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "problem1" => Ok(Preset::Problem1),
            "problem2" => Ok(Preset::Problem2),
            _ => Err(Error::Config(format!("unknown preset '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub sigma2: f64,
    pub lambda_c: f64,
    pub nu: f64,
    /// Constant mean `Z̄` of the log-field.
    pub mean: f64,
}

impl ProblemConfig {
    pub fn matern(&self) -> MaternParams {
        MaternParams {
            sigma2: self.sigma2,
            lambda_c: self.lambda_c,
            nu: self.nu,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Finest level `L`.
    pub max_level: usize,
    /// Upper bound accepted for `max_level`.
    pub max_level_limit: usize,
    /// CE grid on level `ℓ` has `2^{ce_offset+ℓ}+1` points per axis.
    pub ce_offset: usize,
    /// FE mesh on level `ℓ` has `2^{fe_offset+ℓ}+1` nodes per axis.
    pub fe_offset: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QmcConfig {
    /// Generating vector file; the bundled vector when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generating_vector: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    pub shifts: usize,
    pub extension_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Method used by `run` and `dump-gradient`.
    pub method: Method,
    /// Methods compared by `cost-curve`.
    pub methods: Vec<Method>,
    /// Tolerances, descending.
    pub eps: Vec<f64>,
    /// Abort a run after this many finest-solve equivalents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_cap: Option<f64>,
    pub kappa: f64,
    /// Initial points per shift for the lattice methods.
    pub warmup: usize,
    /// Initial samples for the i.i.d. methods.
    pub mc_warmup: usize,
    /// Repetitions behind each measured per-level cost.
    pub timing_reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceStudyConfig {
    /// Sweep `N = 2^n_min_log2 .. 2^n_max_log2` per shift.
    pub n_min_log2: u32,
    pub n_max_log2: u32,
    /// Range of `N` used for the fitted slopes.
    pub fit_min_log2: u32,
    pub fit_max_log2: u32,
}

impl Default for VarianceStudyConfig {
    fn default() -> Self {
        Self {
            n_min_log2: 0,
            n_max_log2: 9,
            fit_min_log2: 3,
            fit_max_log2: 9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Everything that defines an experiment.
///
/// In a config file every key is optional: the file is laid over a preset
/// (`preset = "problem2"`, default `problem1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub problem: ProblemConfig,
    pub geometry: GeometryConfig,
    pub qmc: QmcConfig,
    pub estimator: EstimatorConfig,
    pub objective: TargetAndControl,
    #[serde(default)]
    pub variance_study: VarianceStudyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Desk-scale configuration of one of the two reference problems.
    pub fn preset(p: Preset) -> Self {
        Self {
            master_seed: 1,
            problem: ProblemConfig {
                sigma2: 0.1,
                lambda_c: 1.0,
                nu: p.nu(),
                mean: 0.0,
            },
            geometry: GeometryConfig {
                max_level: 4,
                max_level_limit: 6,
                ce_offset: 0,
                fe_offset: 2,
            },
            qmc: QmcConfig {
                generating_vector: None,
                n_min: None,
                n_max: None,
                shifts: 10,
                extension_seed: 0,
            },
            estimator: EstimatorConfig {
                method: Method::Mlqmc,
                methods: Method::ALL.to_vec(),
                eps: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
                cost_cap: None,
                kappa: 2.0,
                warmup: 2,
                mc_warmup: 20,
                timing_reps: 20,
            },
            objective: TargetAndControl::standard(1e-3),
            variance_study: VarianceStudyConfig::default(),
            output: OutputConfig::default(),
        }
    }

    /// Parses a config file body laid over `base` (or the preset it names).
    pub fn from_toml_str(text: &str, base: Option<Preset>) -> Result<Self> {
        let mut overlay: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let named = match overlay.remove("preset") {
            Some(toml::Value::String(s)) => Some(s.parse::<Preset>()?),
            Some(v) => return Err(Error::Config(format!("preset must be a string, got {v}"))),
            None => None,
        };
        let preset = base.or(named).unwrap_or(Preset::Problem1);
        let mut merged = toml::Table::try_from(Self::preset(preset))
            .map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut merged, overlay);
        let cfg: RunConfig = merged
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative generating-vector paths are resolved
    /// against the file's directory.
    pub fn load(path: &Path, base: Option<Preset>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text, base)?;
        if let Some(gv) = &cfg.qmc.generating_vector {
            if gv.is_relative() {
                let dir = path.parent().unwrap_or(Path::new("."));
                cfg.qmc.generating_vector = Some(dir.join(gv));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.problem
            .matern()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if !self.problem.mean.is_finite() {
            return bad("problem.mean must be finite".into());
        }
        let g = &self.geometry;
        if g.max_level > g.max_level_limit {
            return bad(format!(
                "geometry.max_level {} exceeds the limit {}",
                g.max_level, g.max_level_limit
            ));
        }
        if g.fe_offset == 0 {
            return bad("geometry.fe_offset must be at least 1".into());
        }
        let e = &self.estimator;
        if e.eps.is_empty() {
            return bad("estimator.eps is empty".into());
        }
        if e.eps.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad(format!("estimator.eps must be positive: {:?}", e.eps));
        }
        if e.eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("estimator.eps must be strictly descending: {:?}", e.eps));
        }
        if e.methods.is_empty() {
            return bad("estimator.methods is empty".into());
        }
        if !(e.kappa.is_finite() && e.kappa > 0.0) {
            return bad(format!("estimator.kappa must be positive, got {}", e.kappa));
        }
        if let Some(cap) = e.cost_cap {
            if !(cap > 0.0) {
                return bad(format!("estimator.cost_cap must be positive, got {cap}"));
            }
        }
        if e.warmup == 0 || e.mc_warmup < 2 || e.timing_reps == 0 {
            return bad("warmup >= 1, mc_warmup >= 2 and timing_reps >= 1 are required".into());
        }
        let uses_lattice = e.method.is_qmc() || e.methods.iter().any(|m| m.is_qmc());
        if uses_lattice && self.qmc.shifts < 2 {
            return bad(format!("qmc.shifts must be at least 2, got {}", self.qmc.shifts));
        }
        self.objective
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let v = &self.variance_study;
        if v.n_min_log2 > v.n_max_log2 || v.n_max_log2 > 20 {
            return bad(format!(
                "variance_study sweep 2^{}..2^{} is invalid",
                v.n_min_log2, v.n_max_log2
            ));
        }
        if v.fit_min_log2 >= v.fit_max_log2 {
            return bad("variance_study fit range needs at least two points".into());
        }
        Ok(())
    }

    /// SHA-256 of the serialized config, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        let text = toml::to_string(&c).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// `output.dir`, unless the environment overrides it.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| self.output.dir.clone())
    }
}

fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_differ_only_in_smoothness() {
        let a = RunConfig::preset(Preset::Problem1);
        let b = RunConfig::preset(Preset::Problem2);
        assert_eq!(a.problem.nu, 0.5);
        assert_eq!(b.problem.nu, 2.5);
        assert_eq!((a.problem.sigma2, a.problem.lambda_c), (0.1, 1.0));
        assert_eq!(a.objective, b.objective);
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::preset(Preset::Problem2);
        c.estimator.cost_cap = Some(1e4);
        c.qmc.generating_vector = Some("vec.txt".into());
        let text = c.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&text, None).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml_string().unwrap(), text);
    }

    #[test]
    fn overlay_on_named_preset() {
        let c = RunConfig::from_toml_str(
            "preset = \"problem2\"\nmaster_seed = 7\n[geometry]\nmax_level = 2\n",
            None,
        )
        .unwrap();
        assert_eq!(c.problem.nu, 2.5);
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.geometry.max_level, 2);
        assert_eq!(c.geometry.fe_offset, 2);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "[estimator]\neps = [1e-3, 1e-2]\n",
            "[estimator]\neps = [-1.0]\n",
            "[geometry]\nmax_level = 7\n",
            "[qmc]\nshifts = 1\n",
            "[problem]\nnu = 0.0\n",
            "[problem]\ncolour = 1\n",
            "preset = \"problem3\"\n",
            "master_seed = \"x\"\n",
        ] {
            assert!(
                matches!(RunConfig::from_toml_str(text, None), Err(Error::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = RunConfig::preset(Preset::Problem1);
        let mut b = a.clone();
        b.output.dir = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
        b.master_seed = 2;
        assert_ne!(a.hash(), b.hash());
    }
}
