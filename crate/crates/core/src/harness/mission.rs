use std::io::Write;

use crate::error::{Error, Result};
use crate::mapper::map_entropy;
use crate::numerics::SimRng;
use crate::planner::{select_action, step, AgentState, Choice};
use crate::scene::{Action, Scenario};

/// One row of the mission trace, describing the step that produced time `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub cell: usize,
    pub x: usize,
    pub y: usize,
    pub action: Action,
    pub epsilon: f64,
    pub explored: bool,
    pub chosen_q: f64,
    pub r_detection: f64,
    pub r_map: f64,
    /// Map entropy after the scan at `k`, in nats.
    pub entropy: f64,
    pub statistic: f64,
    pub decision: &'static str,
    pub distance_to_target: f64,
}

pub const TRACE_HEADER: [&str; 14] = [
    "k",
    "cell",
    "x",
    "y",
    "action",
    "epsilon",
    "explored",
    "chosen_q",
    "r_d",
    "r_map",
    "entropy",
    "statistic",
    "decision",
    "distance_to_target",
];

impl TraceRow {
    fn record(&self) -> [String; 14] {
        [
            self.k.to_string(),
            self.cell.to_string(),
            self.x.to_string(),
            self.y.to_string(),
            self.action.name().to_string(),
            self.epsilon.to_string(),
            u8::from(self.explored).to_string(),
            self.chosen_q.to_string(),
            self.r_detection.to_string(),
            self.r_map.to_string(),
            self.entropy.to_string(),
            self.statistic.to_string(),
            self.decision.to_string(),
            self.distance_to_target.to_string(),
        ]
    }
}

pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(|e| Error::io("trace csv", e))?;
    Ok(())
}

/// A single mission, advanced one decision at a time.
///
/// Step `k` draws all of its randomness from substream `(k, 0)` of the seed,
/// so a mission is reproducible step by step.
#[derive(Debug, Clone)]
pub struct Mission {
    scenario: Scenario,
    seed: u64,
    state: AgentState,
    history: Vec<AgentState>,
    trace: Vec<TraceRow>,
}

/// Summary of a finished mission.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionOutcome {
    pub initial_distance: f64,
    pub final_distance: f64,
    pub final_entropy: f64,
    pub steps: usize,
}

impl Mission {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        let state = AgentState::initial(&scenario);
        Mission {
            history: vec![state.clone()],
            scenario,
            seed,
            state,
            trace: Vec::new(),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    /// States at `k = 0, 1, ...` up to the current one.
    pub fn history(&self) -> &[AgentState] {
        &self.history
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn is_finished(&self) -> bool {
        self.state.k >= self.scenario.mission_time()
    }

    /// Plan, move and sense once. Returns `None` once the mission is over.
    pub fn advance(&mut self) -> Result<Option<&TraceRow>> {
        if self.is_finished() {
            return Ok(None);
        }
        let s = &self.scenario;
        let mut rng = SimRng::substream(self.seed, self.state.k as u64, 0);
        let choice: Choice = select_action(&self.state, s, &mut rng)?;
        let next = step(&self.state, choice.action, s, &mut rng)?;
        let chosen = *choice.chosen();
        let rec = next.last_detection.expect("step records a detection");
        let (x, y) = s.grid.coords(next.pose.cell);
        self.trace.push(TraceRow {
            k: next.k,
            cell: next.pose.cell,
            x,
            y,
            action: choice.action,
            epsilon: choice.epsilon,
            explored: choice.explored,
            chosen_q: chosen.q,
            r_detection: chosen.r_detection,
            r_map: chosen.r_map,
            entropy: map_entropy(&next.belief),
            statistic: rec.statistic,
            decision: rec.decision.as_str(),
            distance_to_target: s.distance(next.pose.cell, s.target_cell),
        });
        self.history.push(next.clone());
        self.state = next;
        Ok(self.trace.last())
    }

    pub fn run(&mut self) -> Result<MissionOutcome> {
        while self.advance()?.is_some() {}
        Ok(self.outcome())
    }

    pub fn outcome(&self) -> MissionOutcome {
        let s = &self.scenario;
        MissionOutcome {
            initial_distance: s.distance(s.uav_start, s.target_cell),
            final_distance: s.distance(self.state.pose.cell, s.target_cell),
            final_entropy: map_entropy(&self.state.belief),
            steps: self.state.k,
        }
    }
}
