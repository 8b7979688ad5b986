//! Simulation library for a single radar-equipped agent that explores an
//! unknown 2D grid, builds an occupancy map from energy scans, detects a
//! cooperative emitter with an energy detector, and plans its moves with an
//! epsilon-scheduled finite-horizon lookahead.
//!
//! Module map:
//!
//! - [`scene`]: ground truth, configuration, geometry and move legality.
//! - [`numerics`]: incomplete gamma, Marcum Q, entropy, seeded sampling.
//! - [`radar`]: energy-scan forward model and synthetic scans.
//! - [`mapper`]: log-odds occupancy grid estimation.
//! - [`detector`]: energy detection theory, ROC harness, target-location belief.
//! - [`planner`]: rewards, lookahead Q values, action selection, state stepping.
//! - [`harness`]: mission / ROC / fixed-path runners and artifact emission.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod error;
pub mod harness;
pub mod mapper;
pub mod numerics;
pub mod planner;
pub mod radar;
pub mod scene;

pub use error::{Error, Result};
pub use scene::{load_scenario, Action, Pose, Scenario};

/// Crate version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
