//! Multilevel quasi-Monte Carlo estimation of the gradient of a mean-square
//! tracking objective constrained by an elliptic PDE with a lognormal random
//! diffusion coefficient.

pub mod covariance;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod fem;
pub mod field;
pub mod qmc;
pub mod rng;

pub use error::{Error, Result};
