//! ε-scheduled finite-horizon lookahead planner.
//!
//! Each decision enumerates every legal action sequence of length `T_H`.
//! Along a branch the map belief is advanced with the mean scan that the
//! current MAP map predicts at each visited pose; the target belief is held
//! fixed. A sequence is worth `Σ_ℓ γ^ℓ (w_d r_d + w_m r_map)` and each first
//! action takes the best value among the sequences it starts.

mod lookahead;

use serde::{Deserialize, Serialize};

use crate::detector::{
    sense_and_decide, threshold_from_pfa, update_target_belief, DetectionRecord, TargetBelief,
};
use crate::error::{Error, Result};
use crate::mapper::{init_belief, update_with, BeliefMap};
use crate::numerics::SimRng;
use crate::radar::{synthesize_scan_with, RadarModel, ScanNoise};
use crate::scene::{Action, Pose, Scenario};

pub use lookahead::{
    predicted_detection_reward, predicted_map_reward, q_lookahead, ActionValue, Lookahead,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Discount `γ`.
    pub discount: f64,
    /// Lookahead depth `T_H` in steps.
    pub horizon: usize,
    /// Mission length `T_M`; read from the mission section of a scenario file.
    #[serde(skip)]
    pub mission_time: usize,
    pub w_detection: f64,
    pub w_map: f64,
    /// Lower bound on predicted map entropy in nats.
    pub entropy_floor: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            discount: 0.89,
            horizon: 4,
            mission_time: 13,
            w_detection: 1.0,
            w_map: 1.0,
            entropy_floor: 1e-6,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(Error::invalid("planner.discount", "must lie in [0, 1]"));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("planner.horizon", "must be at least 1"));
        }
        if self.mission_time == 0 {
            return Err(Error::invalid("mission.time_steps", "must be at least 1"));
        }
        for (name, w) in [
            ("planner.w_detection", self.w_detection),
            ("planner.w_map", self.w_map),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(name, "must be a nonnegative number"));
            }
        }
        if self.w_detection == 0.0 && self.w_map == 0.0 {
            return Err(Error::invalid(
                "planner.w_detection",
                "reward weights cannot both be 0",
            ));
        }
        if !(self.entropy_floor > 0.0 && self.entropy_floor.is_finite()) {
            return Err(Error::invalid("planner.entropy_floor", "must be positive"));
        }
        Ok(())
    }
}

/// Exploration rate at step `k` of a mission lasting `mission_time` steps.
pub fn epsilon(k: usize, mission_time: usize) -> f64 {
    let k = k as f64;
    let t = mission_time as f64;
    if k < t / 4.0 {
        0.8
    } else if k < t / 2.0 {
        0.4
    } else {
        0.0
    }
}

/// Agent knowledge at time `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub pose: Pose,
    pub belief: BeliefMap,
    pub target: TargetBelief,
    pub last_detection: Option<DetectionRecord>,
    pub k: usize,
}

impl AgentState {
    pub fn initial(s: &Scenario) -> Self {
        AgentState {
            pose: s.start_pose(),
            belief: init_belief(s),
            target: TargetBelief::uniform(s.cell_count()),
            last_detection: None,
            k: 0,
        }
    }
}

/// Outcome of one action selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub action: Action,
    pub epsilon: f64,
    /// The action was drawn at random rather than by argmax.
    pub explored: bool,
    pub values: Vec<ActionValue>,
}

impl Choice {
    pub fn chosen(&self) -> &ActionValue {
        self.values
            .iter()
            .find(|v| v.action == self.action)
            .expect("chosen action has a value")
    }
}

/// First maximizer in action enumeration order.
pub fn greedy(values: &[ActionValue]) -> Option<Action> {
    let mut best: Option<&ActionValue> = None;
    for v in values {
        if best.is_none_or(|b| v.q > b.q) {
            best = Some(v);
        }
    }
    best.map(|v| v.action)
}

/// ε-greedy choice over the lookahead values.
pub fn select_action(st: &AgentState, s: &Scenario, rng: &mut SimRng) -> Result<Choice> {
    select_action_with(st, s, rng, epsilon(st.k, s.planner.mission_time))
}

/// As [`select_action`] with an explicit exploration rate.
pub fn select_action_with(
    st: &AgentState,
    s: &Scenario,
    rng: &mut SimRng,
    eps: f64,
) -> Result<Choice> {
    let u = rng.uniform();
    let values = q_lookahead(st, s)?;
    let (action, explored) = if u < eps {
        (values[rng.index(values.len())].action, true)
    } else {
        (greedy(&values).expect("nonempty action set"), false)
    };
    Ok(Choice {
        action,
        epsilon: eps,
        explored,
        values,
    })
}

/// Move, scan, update the map, sense the target and update its belief.
pub fn step(st: &AgentState, a: Action, s: &Scenario, rng: &mut SimRng) -> Result<AgentState> {
    step_with(st, a, s, rng, ScanNoise::Gaussian)
}

pub fn step_with(
    st: &AgentState,
    a: Action,
    s: &Scenario,
    rng: &mut SimRng,
    noise: ScanNoise,
) -> Result<AgentState> {
    let pose = s.apply(&st.pose, a)?;
    let k = st.k + 1;
    let scan = synthesize_scan_with(s, &pose, k, rng, noise);
    let radar = RadarModel::new(s);
    let belief = update_with(&radar, &st.belief, &scan.energy, s, &pose)?;
    let xi = threshold_from_pfa(&s.detector)?;
    let rec = sense_and_decide(s, &pose, k, xi, rng);
    let target = update_target_belief(&st.target, &rec, s, &belief);
    Ok(AgentState {
        pose,
        belief,
        target,
        last_detection: Some(rec),
        k,
    })
}

#[cfg(test)]
mod tests;
