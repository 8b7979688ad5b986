//! Experiment orchestration and artifact emission.
//!
//! Every command writes its files through an [`ArtifactSink`] rooted at the
//! output directory and finishes with a `manifest.json` listing each file and
//! its SHA-256. Wall-clock time goes to a separate `timing.json` so that the
//! manifest itself is reproducible.

mod artifacts;
mod commands;
mod mapping;
mod mission;

pub use artifacts::{
    sha256_hex, ArtifactEntry, ArtifactSink, RunManifest, ScenarioSource, MANIFEST_SCHEMA,
};
pub use commands::{cmd_map_fixed, cmd_mission, cmd_roc, RocOptions};
pub use mapping::{run_fixed_trajectory, AccuracyRow, FixedRun};
pub use mission::{Mission, MissionOutcome, TraceRow};
