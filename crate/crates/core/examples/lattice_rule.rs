//! Randomly shifted rank-1 lattice rule against plain Monte Carlo on a smooth
//! four-dimensional product integrand with exact integral 1.
//!
//! cargo run --release --example lattice_rule

use mlqmc::estimators::loglog_slope;
use mlqmc::qmc::{lattice_point, GeneratingVector, ShiftSet};
use mlqmc::rng::{keyed_rng, Stream};
use rand::Rng;

fn f(x: &[f64]) -> f64 {
    x.iter().map(|v| 1.0 + 0.1 * (v - 0.5)).product()
}

/// Mean and variance of the mean over `q.len()` independent replicates.
fn mean_var(q: &[f64]) -> (f64, f64) {
    let r = q.len() as f64;
    let m = q.iter().sum::<f64>() / r;
    (m, q.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (r * (r - 1.0)))
}

fn main() -> mlqmc::Result<()> {
    let gv = GeneratingVector::bundled();
    let z = &gv.entries()[..4];
    let r = 32;
    let shifts = ShiftSet::generate(1, 0, r, 4);
    let mut rng = keyed_rng(2, Stream::Normals, &[]);

    let (mut ns, mut vq, mut vm) = (Vec::new(), Vec::new(), Vec::new());
    println!("     N  lattice mean       V_qmc      V_mc");
    for k in 4..=12 {
        let n = 1u64 << k;
        let mut q = Vec::with_capacity(r);
        for s in 0..r {
            let mut acc = 0.0;
            for i in 1..=n {
                acc += f(&lattice_point(z, n, i, shifts.get(s))?);
            }
            q.push(acc / n as f64);
        }
        let mc: Vec<f64> = (0..r)
            .map(|_| (0..n).map(|_| f(&[rng.gen(), rng.gen(), rng.gen(), rng.gen()])).sum::<f64>() / n as f64)
            .collect();
        let (m, v) = mean_var(&q);
        let (_, w) = mean_var(&mc);
        println!("{n:6}  {m:.12}  {v:.3e}  {w:.3e}");
        ns.push(n as f64);
        vq.push(v);
        vm.push(w);
    }
    println!("slopes: lattice {:.2}, Monte Carlo {:.2}", loglog_slope(&ns, &vq), loglog_slope(&ns, &vm));
    Ok(())
}
