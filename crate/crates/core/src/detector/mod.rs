//! Energy detection of the cooperative emitter.
//!
//! The normalized test statistic over `K` real samples is central
//! chi-square with `K` degrees of freedom without the target and noncentral
//! with noncentrality `λ = K · SNR` when the target is present:
//!
//! * `P_FA = Γ̃(K/2, ξ/2)`
//! * `ξ = 2 Γ̃⁻¹(K/2, P_FA*)`
//! * `P_D = Q_{K/2}(√λ, √ξ)`

mod roc;
mod target_belief;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{inv_reg_gamma_upper, marcum_q, reg_gamma_upper, sample_chi2, SimRng};
use crate::scene::{dbm_to_watts, los_blocked_on, noise_psd, Grid, Pose, Scenario, SPEED_OF_LIGHT};

pub use roc::{lambda_at_distance, run_roc, RocConfig, RocRow, RocSummary, RocTable};
pub use target_belief::{target_log_likelihood, update_target_belief, TargetBelief};

/// Link budget and false-alarm target of the detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Design false-alarm probability.
    pub pfa_star: f64,
    pub target_eirp_dbm: f64,
    pub target_freq_hz: f64,
    /// Receiver bandwidth `W`.
    pub bandwidth_hz: f64,
    /// Observation window `T`; `K = 2 T W`.
    pub observation_time_s: f64,
    pub noise_figure_db: f64,
    /// Beyond this distance the target is treated as unheard.
    pub max_range_m: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            pfa_star: 1e-3,
            target_eirp_dbm: -40.0,
            target_freq_hz: 2.4e9,
            bandwidth_hz: 10e6,
            observation_time_s: 5e-6,
            noise_figure_db: 4.0,
            max_range_m: 50.0,
        }
    }
}

impl DetectorConfig {
    /// Number of real samples `K = round(2 T W)`.
    pub fn n_samples(&self) -> usize {
        (2.0 * self.observation_time_s * self.bandwidth_hz).round() as usize
    }

    /// Noise power `N0ν W` in watts.
    pub fn noise_power(&self) -> f64 {
        noise_psd(self.noise_figure_db) * self.bandwidth_hz
    }

    pub fn target_eirp_watts(&self) -> f64 {
        dbm_to_watts(self.target_eirp_dbm)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pfa_star > 0.0 && self.pfa_star < 1.0) {
            return Err(Error::invalid("detector.pfa_star", "must lie in (0, 1)"));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid("detector.bandwidth_hz", "must be positive"));
        }
        if !(self.observation_time_s > 0.0 && self.observation_time_s.is_finite()) {
            return Err(Error::invalid(
                "detector.observation_time_s",
                "must be positive",
            ));
        }
        if self.n_samples() < 2 {
            return Err(Error::invalid(
                "detector.observation_time_s",
                format!("2 T W = {} gives fewer than 2 samples", self.n_samples()),
            ));
        }
        if !(self.target_freq_hz > 0.0 && self.target_freq_hz.is_finite()) {
            return Err(Error::invalid(
                "detector.target_freq_hz",
                "must be positive",
            ));
        }
        if !self.target_eirp_dbm.is_finite() {
            return Err(Error::invalid("detector.target_eirp_dbm", "must be finite"));
        }
        if !self.noise_figure_db.is_finite() {
            return Err(Error::invalid("detector.noise_figure_db", "must be finite"));
        }
        if !(self.max_range_m > 0.0) {
            return Err(Error::invalid("detector.max_range_m", "must be positive"));
        }
        Ok(())
    }
}

/// Threshold `ξ` giving `P_FA = pfa_star`.
pub fn threshold_from_pfa(cfg: &DetectorConfig) -> Result<f64> {
    threshold_for(cfg, cfg.pfa_star)
}

/// Threshold for an arbitrary false-alarm probability under `cfg`'s sample count.
pub fn threshold_for(cfg: &DetectorConfig, pfa: f64) -> Result<f64> {
    threshold_k(cfg.n_samples(), pfa)
}

pub fn pfa_theoretical(cfg: &DetectorConfig, xi: f64) -> f64 {
    pfa_k(cfg.n_samples(), xi).expect("valid detector order")
}

pub fn pd_theoretical(cfg: &DetectorConfig, xi: f64, lambda: f64) -> f64 {
    pd_k(cfg.n_samples(), xi, lambda).expect("valid detector order")
}

/// `ξ = 2 Γ̃⁻¹(K/2, pfa)` for `k` real samples.
pub fn threshold_k(k: usize, pfa: f64) -> Result<f64> {
    Ok(2.0 * inv_reg_gamma_upper(k as f64 / 2.0, pfa)?)
}

/// `Γ̃(K/2, ξ/2)`; negative thresholds count as 0.
pub fn pfa_k(k: usize, xi: f64) -> Result<f64> {
    reg_gamma_upper(k as f64 / 2.0, xi.max(0.0) / 2.0)
}

/// `Q_{K/2}(√λ, √ξ)`.
pub fn pd_k(k: usize, xi: f64, lambda: f64) -> Result<f64> {
    marcum_q(k as f64 / 2.0, lambda.max(0.0).sqrt(), xi.max(0.0).sqrt())
}

/// Free-space noncentrality at distance `d` (meters), with no range gate.
pub fn friis_lambda(cfg: &DetectorConfig, d: f64) -> f64 {
    let wavelength_ratio = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * d * cfg.target_freq_hz);
    let p_rx = cfg.target_eirp_watts() * wavelength_ratio * wavelength_ratio;
    cfg.n_samples() as f64 * p_rx / cfg.noise_power()
}

/// Noncentrality between `from` and the target cell on occupancy `map`.
pub fn noncentrality_on(
    cfg: &DetectorConfig,
    grid: &Grid,
    map: &[bool],
    from: usize,
    target: usize,
) -> f64 {
    if los_blocked_on(grid, map, from, target) {
        return 0.0;
    }
    let d = grid.distance(from, target).max(grid.cell_size / 2.0);
    if d > cfg.max_range_m {
        return 0.0;
    }
    friis_lambda(cfg, d)
}

/// Noncentrality from `pose` with the target at `target`, on the true map.
pub fn noncentrality(s: &Scenario, pose: &Pose, target: usize) -> f64 {
    noncentrality_on(&s.detector, &s.grid, &s.occupied, pose.cell, target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    /// Target declared absent.
    D0,
    /// Target declared present.
    D1,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::D0 => "D0",
            Decision::D1 => "D1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRecord {
    pub statistic: f64,
    pub threshold: f64,
    pub decision: Decision,
    pub pose: Pose,
    pub k: usize,
}

/// Draw the statistic with the true target position and threshold it.
pub fn sense_and_decide(
    s: &Scenario,
    pose: &Pose,
    k: usize,
    xi: f64,
    rng: &mut SimRng,
) -> DetectionRecord {
    let lambda = noncentrality(s, pose, s.target_cell);
    sense_with_lambda(&s.detector, pose, k, xi, lambda, rng)
}

/// Draw the statistic for a given noncentrality (`0` for target absent).
pub fn sense_with_lambda(
    cfg: &DetectorConfig,
    pose: &Pose,
    k: usize,
    xi: f64,
    lambda: f64,
    rng: &mut SimRng,
) -> DetectionRecord {
    let statistic = sample_chi2(rng, cfg.n_samples() as u32, lambda);
    let decision = if statistic > xi {
        Decision::D1
    } else {
        Decision::D0
    };
    DetectionRecord {
        statistic,
        threshold: xi,
        decision,
        pose: *pose,
        k,
    }
}

/// Error probability `P_M P1 + P_FA P0` with prior `p1` on target presence.
pub fn error_probability(pd: f64, pfa: f64, p1: f64) -> f64 {
    (1.0 - pd) * p1 + pfa * (1.0 - p1)
}

#[cfg(test)]
mod tests;
