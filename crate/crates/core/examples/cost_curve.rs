//! Cost against tolerance for all four estimators on a two-level hierarchy.
//! Costs are in units of one finest-level sample.
//!
//! cargo run --release --example cost_curve

use mlqmc::estimators::Method;
use mlqmc::experiment::{Experiment, Preset, RunConfig};

fn main() -> mlqmc::Result<()> {
    let mut config = RunConfig::preset(Preset::Problem1);
    config.geometry.max_level = 2;
    config.estimator.eps = vec![1e-3, 3e-4, 1e-4];
    config.estimator.methods = Method::ALL.to_vec();
    config.estimator.timing_reps = 5;
    let out = std::env::temp_dir().join("mlqmc-cost-curve");
    let curve = Experiment::with_output(config, &out)?.cost_curve()?;

    println!("method      eps        rmse       cost");
    for r in &curve.rows {
        println!("{:6}  {:.1e}  {:.3e}  {:9.2}", r.method.name(), r.eps, r.rmse_quadrature, r.normalized_cost);
    }
    for e in &curve.exponents {
        println!("{} cost ~ eps^-{:.2}", e.method.name(), e.exponent);
    }
    for c in &curve.level_costs {
        println!("level {} sample: {:.2e} s CE + {:.2e} s FE", c.ell, c.ce_secs, c.fe_secs);
    }
    Ok(())
}
