//! Stochastic dimension and padding of the circulant embedding per level,
//! for both Matérn presets.
//!
//! cargo run --release --example embedding_dimensions

use mlqmc::covariance::{Matern, MaternParams};
use mlqmc::field::{build_embedding, EmbeddingOptions, UniformGrid};

fn main() -> mlqmc::Result<()> {
    let problems = [("problem1", 0.5), ("problem2", 2.5)];
    println!("problem   level  ce_points  ext  s_level  doublings  min_eig_ratio");
    for (name, nu) in problems {
        let kernel = Matern::new(MaternParams::new(0.1, 1.0, nu)?)?;
        for level in 0..=5 {
            let grid = UniformGrid::dyadic(2, level)?;
            let e = build_embedding(&kernel, grid, EmbeddingOptions::default())?;
            println!(
                "{name:9} {level:5}  {:9}  {:3}  {:7}  {:9}  {:+.3e}",
                grid.num_points(),
                e.ext_per_axis(),
                e.stochastic_dim(),
                e.padding_doublings(),
                e.min_eigenvalue_ratio(),
            );
        }
    }
    Ok(())
}
