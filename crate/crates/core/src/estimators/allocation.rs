use crate::error::{Error, Result};

/// What the greedy allocation loop needs from a set of level estimators.
pub trait LevelSampler {
    fn num_levels(&self) -> usize;
    fn variance(&self, ell: usize) -> f64;
    fn samples(&self, ell: usize) -> usize;
    /// Cost of one sample (per shift) on level `ℓ`.
    fn cost_per_sample(&self, ell: usize) -> f64;
    /// Total cost spent so far.
    fn spent(&self) -> f64;
    /// Doubles the sample count on level `ℓ` and refreshes its variance.
    fn double(&mut self, ell: usize) -> Result<()>;
}

/// Record of one allocation run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AllocationTrace {
    /// Level doubled at each step.
    pub doubled: Vec<usize>,
    pub final_variance: f64,
}

impl AllocationTrace {
    pub fn was_doubled(&self, ell: usize) -> bool {
        self.doubled.contains(&ell)
    }
}

/// Index of the largest `V_ℓ/(N_ℓ C_ℓ)`, ties to the smaller `ℓ`.
pub fn select_level<S: LevelSampler + ?Sized>(s: &S) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for ell in 0..s.num_levels() {
        let v = s.variance(ell) / (s.samples(ell) as f64 * s.cost_per_sample(ell));
        if v > best_val {
            best = ell;
            best_val = v;
        }
    }
    best
}

/// Greedy sample allocation: while `Σ V_ℓ > ε²`, double `N_ℓ` on the level with
/// the largest `V_ℓ/(N_ℓ C_ℓ)`.
pub fn allocate_samples<S: LevelSampler + ?Sized>(
    s: &mut S,
    eps: f64,
    cost_cap: Option<f64>,
) -> Result<AllocationTrace> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {eps}")));
    }
    let target = eps * eps;
    let mut trace = AllocationTrace::default();
    loop {
        let total: f64 = (0..s.num_levels()).map(|l| s.variance(l)).sum();
        if total <= target {
            trace.final_variance = total;
            return Ok(trace);
        }
        if let Some(cap) = cost_cap {
            if s.spent() > cap {
                return Err(Error::BudgetExceeded {
                    spent: s.spent(),
                    cap,
                    variance: total,
                    target,
                });
            }
        }
        let ell = select_level(s);
        s.double(ell)?;
        trace.doubled.push(ell);
    }
}

/// `max_ℓ V_ℓ/(N_ℓC_ℓ)` over all levels divided by the minimum over the levels
/// that were doubled at least once. Greedy doubling with `V ∝ N^{−1/λ}` keeps
/// this at most `2^{1+1/λ}`: a level is only doubled while it holds the maximum,
/// and a doubling divides its value by exactly that factor.
pub fn marginal_value_ratio<S: LevelSampler + ?Sized>(s: &S, trace: &AllocationTrace) -> Option<f64> {
    let value = |l: usize| s.variance(l) / (s.samples(l) as f64 * s.cost_per_sample(l));
    let max = (0..s.num_levels()).map(value).fold(f64::NEG_INFINITY, f64::max);
    let min = (0..s.num_levels())
        .filter(|&l| trace.was_doubled(l))
        .map(value)
        .fold(f64::INFINITY, f64::min);
    if min.is_finite() && min > 0.0 {
        Some(max / min)
    } else {
        None
    }
}

/// Synthetic levels with `V_ℓ(N) = v_ℓ / N^{1/λ}`, for exercising the loop.
#[derive(Clone, Debug)]
pub struct SyntheticLevels {
    pub v: Vec<f64>,
    pub cost: Vec<f64>,
    pub n: Vec<usize>,
    pub inv_lambda: f64,
}

impl SyntheticLevels {
    pub fn new(v: Vec<f64>, cost: Vec<f64>, inv_lambda: f64) -> Self {
        let n = vec![1; v.len()];
        Self {
            v,
            cost,
            n,
            inv_lambda,
        }
    }
}

impl LevelSampler for SyntheticLevels {
    fn num_levels(&self) -> usize {
        self.v.len()
    }

    fn variance(&self, ell: usize) -> f64 {
        self.v[ell] / (self.n[ell] as f64).powf(self.inv_lambda)
    }

    fn samples(&self, ell: usize) -> usize {
        self.n[ell]
    }

    fn cost_per_sample(&self, ell: usize) -> f64 {
        self.cost[ell]
    }

    fn spent(&self) -> f64 {
        self.n.iter().zip(&self.cost).map(|(n, c)| *n as f64 * c).sum()
    }

    fn double(&mut self, ell: usize) -> Result<()> {
        self.n[ell] *= 2;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn no_work_when_already_below_tolerance() {
        let mut s = SyntheticLevels::new(vec![1e-6, 1e-7], vec![1.0, 4.0], 1.0);
        let t = allocate_samples(&mut s, 1e-2, None).unwrap();
        assert!(t.doubled.is_empty());
        assert_eq!(s.n, vec![1, 1]);
    }

    #[test]
    fn first_choice_is_largest_marginal_value() {
        let eps = 1e-2;
        let s = SyntheticLevels::new(vec![8.0 * eps * eps, eps * eps / 8.0], vec![1.0, 1.0], 1.0);
        assert_eq!(select_level(&s), 0);
        let tie = SyntheticLevels::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0);
        assert_eq!(select_level(&tie), 0);
    }

    #[test]
    fn stopping_mid_cycle_leaves_factor_four() {
        let mut s = SyntheticLevels::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0);
        let t = allocate_samples(&mut s, 1.7f64.sqrt(), None).unwrap();
        assert_eq!(t.doubled, vec![0]);
        assert_eq!(marginal_value_ratio(&s, &t), Some(4.0));
    }

    #[test]
    fn budget_cap() {
        let mut s = SyntheticLevels::new(vec![1.0], vec![1.0], 1.0);
        assert!(matches!(
            allocate_samples(&mut s, 1e-4, Some(100.0)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    proptest! {
        #[test]
        fn terminates_below_tolerance_with_balanced_marginals(
            v in proptest::collection::vec(1e-6f64..1.0, 1..6),
            eps in 1e-3f64..1e-1,
            inv_lambda in 1.0f64..2.0,
        ) {
            let cost: Vec<f64> = (0..v.len()).map(|l| 4f64.powi(l as i32)).collect();
            let mut s = SyntheticLevels::new(v, cost, inv_lambda);
            let t = allocate_samples(&mut s, eps, None).unwrap();
            prop_assert!(t.final_variance <= eps * eps);
            if let Some(r) = marginal_value_ratio(&s, &t) {
                prop_assert!(r <= 2f64.powf(1.0 + inv_lambda) * (1.0 + 1e-12), "ratio {}", r);
            }
        }
    }
}
