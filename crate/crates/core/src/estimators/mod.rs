//! Monte Carlo, quasi-Monte Carlo and their multilevel versions for `E[q]`.
mod allocation;
mod cost;
mod gradient;
mod hierarchy;
mod level;

pub use allocation::{
    allocate_samples, marginal_value_ratio, select_level, AllocationTrace, LevelSampler,
    SyntheticLevels,
};
pub use cost::{level_cost_profile, loglog_slope, reference_sample_secs, LevelCost};
pub use gradient::{
    estimate_gradient, mc_single_level, mlmc_gradient, mlqmc_gradient, qmc_single_level,
    EstimatorOptions, GradientEstimate, LevelRecord, Manifest, Timing,
};
pub use hierarchy::{HierarchyLevel, HierarchyOptions, LevelHierarchy, TimedSample};
pub use level::{mc_level_estimate, qmc_level_estimate, LevelEstimate, LevelEstimator, Method, LOW_CONFIDENCE_N};
