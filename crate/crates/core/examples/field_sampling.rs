//! Draws lognormal diffusion fields on nested grids from one vector of
//! normals and checks that the coarse field is the restriction of the fine one.
//!
//! cargo run --release --example field_sampling

use mlqmc::covariance::{Matern, MaternParams, MeanField};
use mlqmc::field::{build_embedding, sample_field, EmbeddingOptions, UniformGrid};
use mlqmc::rng::{keyed_rng, Stream};
use rand_distr::{Distribution, StandardNormal};

fn main() -> mlqmc::Result<()> {
    let kernel = Matern::new(MaternParams::new(0.1, 1.0, 0.5)?)?;
    let fine = build_embedding(&kernel, UniformGrid::dyadic(2, 4)?, EmbeddingOptions::default())?;
    let coarse_grid = UniformGrid::dyadic(2, 3)?;

    let mut rng = keyed_rng(7, Stream::Normals, &[]);
    let y: Vec<f64> = (0..fine.stochastic_dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let a = sample_field(&fine, &MeanField::Constant(0.0), &y, 4)?;
    let a_coarse = a.restrict_to_coarse(&coarse_grid)?;

    let (lo, hi) = a
        .values()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!("fine grid {} points, s = {}", a.grid().num_points(), fine.stochastic_dim());
    println!("a ranges over [{lo:.4}, {hi:.4}]");
    println!("a(0.5, 0.5) = {:.6}", a.eval_field(&[0.5, 0.5])?);
    println!(
        "coarse restriction at (0.5, 0.5) = {:.6} on {} points",
        a_coarse.eval_field(&[0.5, 0.5])?,
        coarse_grid.num_points()
    );

    let leading = &fine.ordered_eigenvalues()[..5];
    println!("leading eigenvalues {leading:.3?}");
    Ok(())
}
