//! Level variances of the multilevel lattice estimator against the number of
//! points per shift (Problem 1, three refinement levels).
//!
//! cargo run --release --example variance_study

use mlqmc::experiment::{Experiment, Preset, RunConfig};

fn main() -> mlqmc::Result<()> {
    let mut config = RunConfig::preset(Preset::Problem1);
    config.geometry.max_level = 3;
    config.variance_study.n_max_log2 = 8;
    let out = std::env::temp_dir().join("mlqmc-variance-study");
    let study = Experiment::with_output(config, &out)?.variance_study()?;

    println!("level     N        R*V");
    for row in study.rows.iter().filter(|r| r.n >= 8) {
        println!("{:5}  {:4}  {:.4e}", row.ell, row.n, row.rv);
    }
    for s in &study.slopes {
        println!("level {} slope {:.3} over N = {}..{}", s.ell, s.slope, s.n_from, s.n_to);
    }
    println!("tables in {}", out.display());
    Ok(())
}
