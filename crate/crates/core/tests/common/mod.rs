#![allow(dead_code)]

use mlqmc::experiment::{Experiment, Preset, RunConfig};
use mlqmc::fem::{l2_norm, FeFunction};

pub fn config(preset: Preset, max_level: usize) -> RunConfig {
    let mut c = RunConfig::preset(preset);
    c.geometry.max_level = max_level;
    c
}

/// Problem 1 hierarchy up to `max_level`; nothing is written to disk.
pub fn problem1(max_level: usize) -> Experiment {
    Experiment::with_output(config(Preset::Problem1, max_level), "unused-output").unwrap()
}

pub fn l2_distance(a: &FeFunction, b: &FeFunction) -> f64 {
    l2_norm(&a.sub(b).unwrap())
}
