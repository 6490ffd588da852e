//! Shared fixtures for the criterion benchmarks.

use qnu_core::{NetworkSpec, UtilityModel};

pub fn chain(nodes: usize, eps: f64) -> NetworkSpec {
    NetworkSpec::chain(nodes, 0.6, 0.9, eps).unwrap()
}

pub fn model() -> UtilityModel {
    UtilityModel::new(2.0).unwrap()
}
