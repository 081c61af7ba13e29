//! Matérn covariance for the smoothness values used in the two reference
//! problems, tabulated against distance.
//!
//! cargo run --release --example covariance_kernels

use mlqmc::covariance::{bessel_k, matern_cov, MaternParams};

fn main() -> mlqmc::Result<()> {
    let nus = [0.5, 1.5, 2.5];
    let params: Vec<MaternParams> = nus
        .iter()
        .map(|&nu| MaternParams::new(0.1, 1.0, nu))
        .collect::<mlqmc::Result<_>>()?;

    println!("{:>8}  {:>12}  {:>12}  {:>12}", "r", "nu=0.5", "nu=1.5", "nu=2.5");
    for k in 0..=10 {
        let r = 0.15 * k as f64;
        let row: Vec<f64> = params.iter().map(|p| matern_cov(p, r)).collect::<mlqmc::Result<_>>()?;
        println!("{r:8.3}  {:12.6e}  {:12.6e}  {:12.6e}", row[0], row[1], row[2]);
    }

    // half-integer orders have closed forms: K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
    let x: f64 = 0.7;
    let closed = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
    println!("\nK_0.5({x}) = {:.15e} (closed form {closed:.15e})", bessel_k(0.5, x));
    Ok(())
}
