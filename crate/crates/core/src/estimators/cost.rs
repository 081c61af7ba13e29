use super::hierarchy::LevelHierarchy;
use crate::error::Result;
use crate::rng::{keyed_rng, Stream};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Median per-sample wall time of a plain (uncoupled) level-`ℓ` sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCost {
    pub ell: usize,
    pub ce_secs: f64,
    pub fe_secs: f64,
    /// Model cost `h_ℓ^{−κ}` in finest-solve units.
    pub model_cost: f64,
}

impl LevelCost {
    pub fn total_secs(&self) -> f64 {
        self.ce_secs + self.fe_secs
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Times `reps` sequential samples on every level.
pub fn level_cost_profile(hier: &LevelHierarchy, reps: usize, seed: u64) -> Result<Vec<LevelCost>> {
    let reps = reps.max(1);
    let mut out = Vec::with_capacity(hier.max_level() + 1);
    for lvl in hier.levels() {
        let s = lvl.stochastic_dim();
        let mut ce = Vec::with_capacity(reps);
        let mut fe = Vec::with_capacity(reps);
        for i in 0..reps {
            let mut rng = keyed_rng(seed, Stream::Normals, &[u64::MAX, lvl.ell as u64, i as u64]);
            let y: Vec<f64> = (0..s).map(|_| StandardNormal.sample(&mut rng)).collect();
            let t = hier.timed_sample(lvl.ell, &y, false)?;
            ce.push(t.ce_secs);
            fe.push(t.fe_secs);
        }
        out.push(LevelCost {
            ell: lvl.ell,
            ce_secs: median(&mut ce),
            fe_secs: median(&mut fe),
            model_cost: hier.model_cost(lvl.ell, false),
        });
    }
    Ok(out)
}

/// Median wall time of one finest-level sample: the unit of measured cost.
pub fn reference_sample_secs(hier: &LevelHierarchy, reps: usize, seed: u64) -> Result<f64> {
    Ok(level_cost_profile(hier, reps, seed)?
        .last()
        .map_or(0.0, LevelCost::total_secs))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        assert!((loglog_slope(&x, &y) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
