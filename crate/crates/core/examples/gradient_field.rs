//! Gradient of the tracking objective at the control z, estimated by MLQMC,
//! printed as a coarse slice through the domain.
//!
//! cargo run --release --example gradient_field

use mlqmc::estimators::{estimate_gradient, Method};
use mlqmc::experiment::{Experiment, Preset, RunConfig};

fn main() -> mlqmc::Result<()> {
    let mut config = RunConfig::preset(Preset::Problem2);
    config.geometry.max_level = 3;
    let exp = Experiment::with_output(config, std::env::temp_dir().join("mlqmc-gradient"))?;
    let est = estimate_gradient(exp.hierarchy(), Method::Mlqmc, 1e-4, &exp.estimator_options())?;

    for l in &est.levels {
        println!("level {}: N = {:4}, R = {}, V = {:.3e}", l.ell, l.n, l.r, l.variance);
    }
    println!("rmse {:.3e}, cost {:.1} finest samples", est.rmse_quadrature, est.cost_total);
    println!("\ngradient along x2 = 0.5:");
    for k in 0..=8 {
        let x = k as f64 / 8.0;
        println!("  x1 = {x:.3}  {:+.5e}", est.gradient.eval([x, 0.5]));
    }
    Ok(())
}
