//! On-disk JSON layout of a scenario (`schema_version` 1).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Grid, RadioConfig, Scenario};
use crate::detector::{DetectorConfig, RocConfig};
use crate::error::{Error, Result};
use crate::planner::PlannerConfig;

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub width: usize,
    pub height: usize,
    #[serde(default = "one_meter")]
    pub cell_size_m: f64,
}

fn one_meter() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcsOverride {
    pub cell: usize,
    pub m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcsSection {
    #[serde(default = "one_square_meter")]
    pub default_m2: f64,
    #[serde(default)]
    pub overrides: Vec<RcsOverride>,
}

fn one_square_meter() -> f64 {
    1.0
}

impl Default for RcsSection {
    fn default() -> Self {
        RcsSection {
            default_m2: 1.0,
            overrides: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSection {
    /// Cell index `y * width + x`.
    pub uav_start: usize,
    /// Cell index `y * width + x`.
    pub target_cell: usize,
    #[serde(default = "default_mission_time")]
    pub time_steps: usize,
}

fn default_mission_time() -> usize {
    13
}

/// Scenario file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub grid: GridSection,
    /// Occupied cell indices `y * width + x`.
    pub occupied: Vec<usize>,
    #[serde(default)]
    pub rcs: RcsSection,
    pub radio: RadioConfig,
    pub detector: DetectorConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
    pub mission: MissionSection,
    #[serde(default)]
    pub trajectories: BTreeMap<String, Vec<[usize; 2]>>,
    #[serde(default)]
    pub roc: RocConfig,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(file: ScenarioFile) -> Result<Scenario> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("unsupported version {}", file.schema_version),
            ));
        }
        let grid = Grid {
            width: file.grid.width,
            height: file.grid.height,
            cell_size: file.grid.cell_size_m,
        };
        let n = grid.cell_count();
        let mut occupied = vec![false; n];
        for &cell in &file.occupied {
            if cell >= n {
                return Err(Error::invalid(
                    "occupied",
                    format!("cell {cell} outside the grid"),
                ));
            }
            occupied[cell] = true;
        }
        let mut rcs = vec![file.rcs.default_m2; n];
        for o in &file.rcs.overrides {
            if o.cell >= n {
                return Err(Error::invalid(
                    "rcs.overrides",
                    format!("cell {} outside the grid", o.cell),
                ));
            }
            rcs[o.cell] = o.m2;
        }
        let mut planner = file.planner;
        planner.mission_time = file.mission.time_steps;

        let scenario = Scenario {
            name: file.name,
            grid,
            occupied,
            rcs,
            target_cell: file.mission.target_cell,
            uav_start: file.mission.uav_start,
            radio: file.radio,
            detector: file.detector,
            planner,
            trajectories: file
                .trajectories
                .into_iter()
                .map(|(k, v)| (k, v.into_iter().map(|[x, y]| (x, y)).collect()))
                .collect(),
            roc: file.roc,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let default_m2 = s
            .occupied
            .iter()
            .position(|&o| o)
            .map(|c| s.rcs[c])
            .unwrap_or(1.0);
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            name: s.name.clone(),
            grid: GridSection {
                width: s.grid.width,
                height: s.grid.height,
                cell_size_m: s.grid.cell_size,
            },
            occupied: (0..s.cell_count()).filter(|&c| s.occupied[c]).collect(),
            rcs: RcsSection {
                default_m2,
                overrides: (0..s.cell_count())
                    .filter(|&c| s.rcs[c] != default_m2)
                    .map(|c| RcsOverride {
                        cell: c,
                        m2: s.rcs[c],
                    })
                    .collect(),
            },
            radio: s.radio.clone(),
            detector: s.detector.clone(),
            planner: s.planner.clone(),
            mission: MissionSection {
                uav_start: s.uav_start,
                target_cell: s.target_cell,
                time_steps: s.planner.mission_time,
            },
            trajectories: s
                .trajectories
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|&(x, y)| [x, y]).collect()))
                .collect(),
            roc: s.roc.clone(),
        }
    }
}
