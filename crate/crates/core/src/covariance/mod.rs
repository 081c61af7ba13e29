//! Stationary isotropic covariance kernels.

mod bessel;

pub use bessel::{bessel_k, bessel_k_scaled};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::sync::Arc;

/// Below this scaled distance the Matérn kernel is evaluated from its
/// small-argument expansion instead of the Bessel product.
const SMALL_T: f64 = 1e-8;

/// A homogeneous, isotropic covariance function of the distance `‖x − x′‖`.
pub trait CovarianceKernel: Send + Sync {
    /// Covariance at distance `r >= 0`.
    fn cov(&self, r: f64) -> f64;

    /// Pointwise variance, `cov(0)`.
    fn variance(&self) -> f64 {
        self.cov(0.0)
    }
}

/// Matérn covariance parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaternParams {
    pub sigma2: f64,
    pub lambda_c: f64,
    pub nu: f64,
}

impl MaternParams {
    pub fn new(sigma2: f64, lambda_c: f64, nu: f64) -> Result<Self> {
        let p = Self {
            sigma2,
            lambda_c,
            nu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.sigma2) && ok(self.lambda_c) && ok(self.nu)) {
            return Err(Error::Domain(format!(
                "Matérn parameters must be positive and finite: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Matérn covariance `σ² 2^{1−ν}/Γ(ν) t^ν K_ν(t)` with `t = √(2ν) r / λ_c`.
pub fn matern_cov(p: &MaternParams, r: f64) -> Result<f64> {
    p.validate()?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("negative or NaN distance {r}")));
    }
    Ok(Matern::from_params(*p).cov(r))
}

/// Matérn kernel with the normalization constant precomputed.
#[derive(Clone, Copy, Debug)]
pub struct Matern {
    params: MaternParams,
    log_norm: f64,
    scale: f64,
}

impl Matern {
    pub fn new(params: MaternParams) -> Result<Self> {
        params.validate()?;
        Ok(Self::from_params(params))
    }

    fn from_params(params: MaternParams) -> Self {
        let nu = params.nu;
        Self {
            params,
            log_norm: (1.0 - nu) * std::f64::consts::LN_2 - gamma(nu).ln(),
            scale: (2.0 * nu).sqrt() / params.lambda_c,
        }
    }

    pub fn params(&self) -> &MaternParams {
        &self.params
    }

    fn small_t(&self, t: f64) -> f64 {
        let nu = self.params.nu;
        let s2 = self.params.sigma2;
        if nu > 1.0 {
            s2 * (1.0 - t * t / (4.0 * (nu - 1.0)))
        } else if nu < 1.0 {
            let c = gamma(1.0 - nu) / gamma(1.0 + nu);
            s2 * (1.0 - c * (0.5 * t).powf(2.0 * nu))
        } else {
            s2
        }
    }
}

impl CovarianceKernel for Matern {
    fn cov(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.params.sigma2;
        }
        let t = self.scale * r;
        if t < SMALL_T {
            return self.small_t(t);
        }
        let nu = self.params.nu;
        let log = self.log_norm + nu * t.ln() - t;
        self.params.sigma2 * log.exp() * bessel_k_scaled(nu, t)
    }

    fn variance(&self) -> f64 {
        self.params.sigma2
    }
}

/// Uncorrelated surrogate: `σ²` at `r = 0` and zero elsewhere.
#[derive(Clone, Copy, Debug)]
pub struct WhiteNoise {
    pub sigma2: f64,
}

impl CovarianceKernel for WhiteNoise {
    fn cov(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.sigma2
        } else {
            0.0
        }
    }
}

impl<K: CovarianceKernel + ?Sized> CovarianceKernel for Arc<K> {
    fn cov(&self, r: f64) -> f64 {
        (**self).cov(r)
    }

    fn variance(&self) -> f64 {
        (**self).variance()
    }
}

/// Mean `Z̄` of the Gaussian log-field.
#[derive(Clone)]
pub enum MeanField {
    Constant(f64),
    Function(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl MeanField {
    pub fn at(&self, x: &[f64]) -> f64 {
        match self {
            MeanField::Constant(c) => *c,
            MeanField::Function(f) => f(x),
        }
    }
}

impl Default for MeanField {
    fn default() -> Self {
        MeanField::Constant(0.0)
    }
}

impl std::fmt::Debug for MeanField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeanField::Constant(c) => write!(f, "MeanField::Constant({c})"),
            MeanField::Function(_) => write!(f, "MeanField::Function(..)"),
        }
    }
}
