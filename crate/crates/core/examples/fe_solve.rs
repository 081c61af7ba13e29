//! State and adjoint solves for one random coefficient, plus the L² error
//! of the Poisson solver against a manufactured solution.
//!
//! cargo run --release --example fe_solve

use mlqmc::covariance::{Matern, MaternParams, MeanField};
use mlqmc::fem::{
    assemble_load, assemble_stiffness_with, l2_norm, FeFunction, FeLevel, PdeLevel, SpdSolver,
    TargetAndControl,
};
use mlqmc::field::{build_embedding, sample_field, EmbeddingOptions, UniformGrid};
use std::f64::consts::PI;

fn main() -> mlqmc::Result<()> {
    let u = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
    println!("level  nodes  L2 error    iterations");
    for level in 1..=5 {
        let mesh = FeLevel::new(level);
        let solver = SpdSolver::new(assemble_stiffness_with(mesh, |_| 1.0));
        let (x, stats) = solver.solve(&assemble_load(mesh, |x| 2.0 * PI * PI * u(x)))?;
        let err = FeFunction::from_values(mesh, x)?.sub(&FeFunction::interpolate(mesh, u))?;
        println!("{level:5}  {:5}  {:.3e}  {:10}", mesh.num_nodes(), l2_norm(&err), stats.iterations);
    }

    let kernel = Matern::new(MaternParams::new(0.1, 1.0, 0.5)?)?;
    let e = build_embedding(&kernel, UniformGrid::dyadic(2, 3)?, EmbeddingOptions::default())?;
    let y = vec![0.5; e.stochastic_dim()];
    let a = sample_field(&e, &MeanField::Constant(0.0), &y, 3)?;
    let pde = PdeLevel::new(FeLevel::new(3), &TargetAndControl::standard(1e-3));
    let sol = pde.solve(&a)?;
    println!(
        "\nrandom coefficient: |u| = {:.4e}, |q| = {:.4e}, residuals {:.1e} / {:.1e}",
        l2_norm(&sol.state),
        l2_norm(&sol.adjoint),
        sol.state_stats.relative_residual,
        sol.adjoint_stats.relative_residual
    );
    Ok(())
}
