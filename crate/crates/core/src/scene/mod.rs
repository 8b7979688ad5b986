//! Ground truth: grid geometry, obstacles, radio constants, move legality and
//! line of sight.

mod config;
pub mod los;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detector::{DetectorConfig, RocConfig};
use crate::error::{Error, Result};
use crate::planner::PlannerConfig;

pub use config::{GridSection, MissionSection, RcsOverride, RcsSection, ScenarioFile};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reference noise temperature in kelvin.
pub const REFERENCE_TEMPERATURE: f64 = 290.0;

/// One-sided noise PSD `k T0 F` in W/Hz for a receiver noise figure in dB.
pub fn noise_psd(noise_figure_db: f64) -> f64 {
    BOLTZMANN * REFERENCE_TEMPERATURE * 10f64.powf(noise_figure_db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Mapping radar constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioConfig {
    pub eirp_dbm: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub center_freq_hz: f64,
    pub scan_time_s: f64,
    pub frame_time_s: f64,
    /// Number of steering directions per scan.
    pub n_rot: usize,
    /// Array elements; a perfect square (4x4, 10x10, ...).
    pub n_elements: usize,
}

impl RadioConfig {
    pub fn eirp_watts(&self) -> f64 {
        dbm_to_watts(self.eirp_dbm)
    }

    /// `N0` in W/Hz.
    pub fn noise_psd(&self) -> f64 {
        noise_psd(self.noise_figure_db)
    }

    /// Energy-bin duration `T_ED = 1 / W`.
    pub fn bin_duration(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }

    /// Pulses per steering direction, `ceil((T_scan / N_rot) / T_f)`.
    pub fn n_pulses(&self) -> usize {
        let ratio = self.scan_time_s / self.n_rot as f64 / self.frame_time_s;
        (ratio - 1e-9).ceil().max(0.0) as usize
    }

    /// Range bins per frame, `floor(T_f / T_ED)`.
    pub fn n_bins(&self) -> usize {
        (self.frame_time_s * self.bandwidth_hz + 1e-9)
            .floor()
            .max(0.0) as usize
    }

    /// Noise energy per bin, `E_n = N0 W N_p T_ED`.
    pub fn noise_energy(&self) -> f64 {
        self.noise_psd() * self.bandwidth_hz * self.n_pulses() as f64 * self.bin_duration()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(
                    format!("radio.{name}"),
                    format!("must be positive, got {v}"),
                ))
            }
        };
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("center_freq_hz", self.center_freq_hz)?;
        positive("scan_time_s", self.scan_time_s)?;
        positive("frame_time_s", self.frame_time_s)?;
        if !self.eirp_dbm.is_finite() {
            return Err(Error::invalid("radio.eirp_dbm", "must be finite"));
        }
        if !self.noise_figure_db.is_finite() {
            return Err(Error::invalid("radio.noise_figure_db", "must be finite"));
        }
        if self.n_rot < 1 {
            return Err(Error::invalid(
                "radio.n_rot",
                "need at least one steering direction",
            ));
        }
        let side = (self.n_elements as f64).sqrt().round() as usize;
        if self.n_elements == 0 || side * side != self.n_elements {
            return Err(Error::invalid(
                "radio.n_elements",
                format!("must be a nonzero perfect square, got {}", self.n_elements),
            ));
        }
        if self.n_pulses() < 1 {
            return Err(Error::invalid(
                "radio.frame_time_s",
                "yields zero pulses per direction",
            ));
        }
        if self.n_bins() < 1 {
            return Err(Error::invalid(
                "radio.frame_time_s",
                "shorter than one energy bin",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    /// Cell pitch in meters.
    pub cell_size: f64,
}

impl Grid {
    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.width, cell / self.width)
    }

    /// Cell center in meters; `x` grows east, `y` grows north.
    pub fn center(&self, cell: usize) -> (f64, f64) {
        let (x, y) = self.coords(cell);
        (
            (x as f64 + 0.5) * self.cell_size,
            (y as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Euclidean distance between two cell centers in meters.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        let dx = ax as f64 - bx as f64;
        let dy = ay as f64 - by as f64;
        dx.hypot(dy) * self.cell_size
    }

    /// Squared center distance in cells; distances on the grid only take these values.
    pub fn distance_sq_cells(&self, a: usize, b: usize) -> usize {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        ax.abs_diff(bx).pow(2) + ay.abs_diff(by).pow(2)
    }

    /// Bearing from `a` to `b` in radians, counter-clockwise from east.
    pub fn bearing(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        (by as f64 - ay as f64).atan2(bx as f64 - ax as f64)
    }
}

/// Agent position: a free cell and its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub cell: usize,
    pub x: f64,
    pub y: f64,
}

impl Pose {
    pub fn at(grid: &Grid, cell: usize) -> Self {
        let (x, y) = grid.center(cell);
        Pose { cell, x, y }
    }
}

/// One-cell move. The order of [`Action::ALL`] breaks ties everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    North,
    East,
    South,
    West,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::North, Action::East, Action::South, Action::West];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Action::North => (0, 1),
            Action::East => (1, 0),
            Action::South => (0, -1),
            Action::West => (-1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::North => "N",
            Action::East => "E",
            Action::South => "S",
            Action::West => "W",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Action> {
        Action::ALL.get(code as usize).copied()
    }
}

/// Immutable ground truth and configuration for one experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub grid: Grid,
    /// True occupancy per cell.
    pub occupied: Vec<bool>,
    /// Radar cross section per cell in m²; only read for occupied cells.
    pub rcs: Vec<f64>,
    pub target_cell: usize,
    pub uav_start: usize,
    pub radio: RadioConfig,
    pub detector: DetectorConfig,
    pub planner: PlannerConfig,
    /// Named waypoint paths for fixed-trajectory mapping runs, as `(x, y)` cells.
    pub trajectories: BTreeMap<String, Vec<(usize, usize)>>,
    pub roc: RocConfig,
}

/// Read and validate a scenario JSON file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_json_str(&text)
}

const REFERENCE_N100: &str = include_str!("../../scenarios/reference_n100.json");
const REFERENCE_N16: &str = include_str!("../../scenarios/reference_n16.json");

/// JSON text of the shipped reference room for a 16- or 100-element array.
pub fn reference_json(n_elements: usize) -> Option<&'static str> {
    match n_elements {
        16 => Some(REFERENCE_N16),
        100 => Some(REFERENCE_N100),
        _ => None,
    }
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Scenario> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Scenario::try_from(file)
    }

    /// The shipped 10 m x 10 m reference room with a 4x4 (`16`) or 10x10 (`100`) array.
    pub fn reference(n_elements: usize) -> Scenario {
        let text = reference_json(n_elements)
            .unwrap_or_else(|| panic!("no reference scenario for {n_elements} elements"));
        Scenario::from_json_str(text).expect("shipped reference scenario is valid")
    }

    /// Same radio, detector and planner settings on a different room with unit
    /// RCS everywhere and no trajectories.
    pub fn relayout(
        &self,
        width: usize,
        height: usize,
        occupied: &[(usize, usize)],
        uav_start: usize,
        target_cell: usize,
    ) -> Result<Scenario> {
        let grid = Grid {
            width,
            height,
            cell_size: self.grid.cell_size,
        };
        let mut occ = vec![false; grid.cell_count()];
        for &(x, y) in occupied {
            if x >= width || y >= height {
                return Err(Error::invalid(
                    "occupied",
                    format!("({x}, {y}) outside the grid"),
                ));
            }
            occ[grid.index(x, y)] = true;
        }
        let s = Scenario {
            name: format!("{}-{width}x{height}", self.name),
            grid,
            occupied: occ,
            rcs: vec![1.0; grid.cell_count()],
            target_cell,
            uav_start,
            radio: self.radio.clone(),
            detector: self.detector.clone(),
            planner: self.planner.clone(),
            trajectories: BTreeMap::new(),
            roc: self.roc.clone(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn cell_count(&self) -> usize {
        self.grid.cell_count()
    }

    pub fn mission_time(&self) -> usize {
        self.planner.mission_time
    }

    pub fn is_free(&self, cell: usize) -> bool {
        cell < self.occupied.len() && !self.occupied[cell]
    }

    /// Pose at `cell`, which must be a free in-grid cell.
    pub fn pose(&self, cell: usize) -> Result<Pose> {
        if cell >= self.cell_count() {
            return Err(Error::invalid(
                "pose",
                format!("cell {cell} outside the grid"),
            ));
        }
        if self.occupied[cell] {
            return Err(Error::invalid("pose", format!("cell {cell} is occupied")));
        }
        Ok(Pose::at(&self.grid, cell))
    }

    pub fn start_pose(&self) -> Pose {
        Pose::at(&self.grid, self.uav_start)
    }

    /// Neighbor reached by `action`, if it is inside the grid (occupancy not checked).
    pub fn neighbor(&self, cell: usize, action: Action) -> Option<usize> {
        let (x, y) = self.grid.coords(cell);
        let (dx, dy) = action.delta();
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        self.grid
            .contains(nx, ny)
            .then(|| self.grid.index(nx as usize, ny as usize))
    }

    /// Moves from `pose` that stay inside the grid and land on a free cell,
    /// in [`Action::ALL`] order. Uses true adjacency only.
    pub fn legal_actions(&self, pose: &Pose) -> Vec<Action> {
        Action::ALL
            .into_iter()
            .filter(|&a| {
                self.neighbor(pose.cell, a)
                    .is_some_and(|n| !self.occupied[n])
            })
            .collect()
    }

    pub fn apply(&self, pose: &Pose, action: Action) -> Result<Pose> {
        match self.neighbor(pose.cell, action) {
            Some(n) if !self.occupied[n] => Ok(Pose::at(&self.grid, n)),
            _ => Err(Error::IllegalAction {
                action,
                cell: pose.cell,
            }),
        }
    }

    /// Whether the true obstacles block the segment between the two cell centers.
    pub fn los_blocked(&self, a: usize, b: usize) -> bool {
        los_blocked_on(&self.grid, &self.occupied, a, b)
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.grid.distance(a, b)
    }

    /// Cells visited along a named trajectory, one entry per scan position.
    pub fn trajectory_cells(&self, name: &str) -> Result<Vec<usize>> {
        let waypoints = self
            .trajectories
            .get(name)
            .ok_or_else(|| Error::UnknownTrajectory(name.to_string()))?;
        Ok(expand_waypoints(&self.grid, waypoints))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.cell_count();
        if self.grid.width == 0 || self.grid.height == 0 {
            return Err(Error::invalid("grid", "width and height must be positive"));
        }
        if !(self.grid.cell_size > 0.0) || !self.grid.cell_size.is_finite() {
            return Err(Error::invalid("grid.cell_size_m", "must be positive"));
        }
        if self.occupied.len() != n || self.rcs.len() != n {
            return Err(Error::invalid("occupied", "length does not match the grid"));
        }
        if let Some(bad) = self.rcs.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::invalid(
                "rcs",
                format!("must be positive, got {bad}"),
            ));
        }
        for (field, cell) in [
            ("mission.target_cell", self.target_cell),
            ("mission.uav_start", self.uav_start),
        ] {
            if cell >= n {
                return Err(Error::invalid(
                    field,
                    format!("cell {cell} outside the grid"),
                ));
            }
            if self.occupied[cell] {
                return Err(Error::invalid(field, format!("cell {cell} is occupied")));
            }
        }
        self.radio.validate()?;
        self.detector.validate()?;
        self.planner.validate()?;
        self.roc.validate()?;
        for (name, waypoints) in &self.trajectories {
            let field = format!("trajectories.{name}");
            for &(x, y) in waypoints {
                if !self.grid.contains(x as i64, y as i64) {
                    return Err(Error::invalid(
                        &field,
                        format!("waypoint ({x}, {y}) outside the grid"),
                    ));
                }
            }
            for cell in expand_waypoints(&self.grid, waypoints) {
                if self.occupied[cell] {
                    let (x, y) = self.grid.coords(cell);
                    return Err(Error::invalid(
                        &field,
                        format!("path crosses occupied cell ({x}, {y})"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// LOS test against an arbitrary occupancy assignment: true iff some cell
/// strictly between the two endpoints is occupied.
pub fn los_blocked_on(grid: &Grid, occupied: &[bool], a: usize, b: usize) -> bool {
    los::walk(grid.coords(a), grid.coords(b), |(x, y)| {
        occupied[grid.index(x, y)]
    })
}

/// Expand waypoints into the visited cell sequence, moving along x then y
/// between consecutive waypoints.
pub fn expand_waypoints(grid: &Grid, waypoints: &[(usize, usize)]) -> Vec<usize> {
    let mut cells = Vec::new();
    let Some(&first) = waypoints.first() else {
        return cells;
    };
    let (mut x, mut y) = first;
    cells.push(grid.index(x, y));
    for &(tx, ty) in &waypoints[1..] {
        while x != tx {
            x = if tx > x { x + 1 } else { x - 1 };
            cells.push(grid.index(x, y));
        }
        while y != ty {
            y = if ty > y { y + 1 } else { y - 1 };
            cells.push(grid.index(x, y));
        }
    }
    cells
}
