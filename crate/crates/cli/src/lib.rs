//! Configuration-driven scenario runner and acceptance suite for `dirac-jump`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod oracles;
pub mod report;
pub mod scenario;

pub use config::{ConfigError, ScenarioConfig, ScenarioKind};
pub use scenario::{run_scenario, ScenarioError, ScenarioReport};
