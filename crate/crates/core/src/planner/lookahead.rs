//! Certainty-equivalent tree search.

use std::collections::HashMap;

use super::AgentState;
use crate::detector::{noncentrality_on, pd_theoretical, threshold_from_pfa, TargetBelief};
use crate::error::{Error, Result};
use crate::mapper::{map_entropy, map_estimate, update_with, BeliefMap};
use crate::radar::{EnergyMatrix, RadarModel};
use crate::scene::{Action, Pose, Scenario};

/// Lookahead value of a first action and the immediate rewards at its successor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionValue {
    pub action: Action,
    pub q: f64,
    pub r_detection: f64,
    pub r_map: f64,
}

/// Per-decision search context. Predicted scans and detection rewards
/// depend only on the pose, so they are cached by cell.
pub struct Lookahead<'a> {
    s: &'a Scenario,
    target: &'a TargetBelief,
    radar: RadarModel,
    map: Vec<bool>,
    xi: f64,
    /// Entropy of a fully uncertain map, `N ln 2`.
    h0: f64,
    scans: HashMap<usize, EnergyMatrix>,
    detection: HashMap<usize, f64>,
    pd: HashMap<u64, f64>,
}

impl<'a> Lookahead<'a> {
    pub fn new(st: &'a AgentState, s: &'a Scenario) -> Result<Self> {
        Ok(Lookahead {
            s,
            target: &st.target,
            radar: RadarModel::new(s),
            map: map_estimate(&st.belief),
            xi: threshold_from_pfa(&s.detector)?,
            h0: s.cell_count() as f64 * std::f64::consts::LN_2,
            scans: HashMap::new(),
            detection: HashMap::new(),
            pd: HashMap::new(),
        })
    }

    /// Expected detection probability at `pose` under the target belief.
    pub fn detection_reward(&mut self, pose: &Pose) -> f64 {
        if let Some(&r) = self.detection.get(&pose.cell) {
            return r;
        }
        let cfg = &self.s.detector;
        let mut acc = 0.0;
        for (c, &m) in self.target.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let lambda = noncentrality_on(cfg, &self.s.grid, &self.map, pose.cell, c);
            let xi = self.xi;
            let pd = *self
                .pd
                .entry(lambda.to_bits())
                .or_insert_with(|| pd_theoretical(cfg, xi, lambda));
            acc += m * pd;
        }
        self.detection.insert(pose.cell, acc);
        acc
    }

    /// Belief after the mean scan the MAP map predicts at `pose`.
    pub fn advance(&mut self, belief: &BeliefMap, pose: &Pose) -> Result<BeliefMap> {
        let (s, radar, map) = (self.s, &self.radar, &self.map);
        let scan = self.scans.entry(pose.cell).or_insert_with(|| {
            let signal = radar.signal_energy(s, map, pose);
            radar.stats_from_signal(signal).mean
        });
        update_with(&self.radar, belief, scan, self.s, pose)
    }

    /// `H0 / max(H, h_floor)`.
    pub fn map_reward(&self, belief: &BeliefMap) -> f64 {
        self.h0 / map_entropy(belief).max(self.s.planner.entropy_floor)
    }

    fn combined(&self, r_d: f64, r_m: f64) -> f64 {
        self.s.planner.w_detection * r_d + self.s.planner.w_map * r_m
    }

    fn search(&mut self, depth: usize, pose: Pose, belief: &BeliefMap, acc: f64) -> Result<f64> {
        let cfg = &self.s.planner;
        if depth == cfg.horizon {
            return Ok(acc);
        }
        let weight = cfg.discount.powi(depth as i32);
        let mut best = f64::NEG_INFINITY;
        let legal = self.s.legal_actions(&pose);
        if legal.is_empty() {
            return Ok(acc);
        }
        for a in legal {
            let next = self.s.apply(&pose, a)?;
            let nb = self.advance(belief, &next)?;
            let r_d = self.detection_reward(&next);
            let r = self.combined(r_d, self.map_reward(&nb));
            let v = self.search(depth + 1, next, &nb, acc + weight * r)?;
            best = best.max(v);
        }
        Ok(best)
    }

    /// Q value of every legal first action from `st`.
    pub fn q_values(&mut self, st: &AgentState) -> Result<Vec<ActionValue>> {
        let legal = self.s.legal_actions(&st.pose);
        if legal.is_empty() {
            return Err(Error::Boxed(st.pose.cell));
        }
        let mut out = Vec::with_capacity(legal.len());
        for a in legal {
            let next = self.s.apply(&st.pose, a)?;
            let nb = self.advance(&st.belief, &next)?;
            let r_detection = self.detection_reward(&next);
            let r_map = self.map_reward(&nb);
            let r = self.combined(r_detection, r_map);
            let q = self.search(1, next, &nb, r)?;
            out.push(ActionValue {
                action: a,
                q,
                r_detection,
                r_map,
            });
        }
        Ok(out)
    }
}

/// Map reward after the certainty-equivalent scan at `pose`.
pub fn predicted_map_reward(st: &AgentState, pose: &Pose, s: &Scenario) -> Result<f64> {
    let mut la = Lookahead::new(st, s)?;
    let nb = la.advance(&st.belief, pose)?;
    Ok(la.map_reward(&nb))
}

/// Expected `P_D` at `pose` under the agent's target belief, LOS judged on the MAP map.
pub fn predicted_detection_reward(st: &AgentState, pose: &Pose, s: &Scenario) -> Result<f64> {
    Ok(Lookahead::new(st, s)?.detection_reward(pose))
}

/// Lookahead Q values for every legal first action, in enumeration order.
pub fn q_lookahead(st: &AgentState, s: &Scenario) -> Result<Vec<ActionValue>> {
    Lookahead::new(st, s)?.q_values(st)
}
