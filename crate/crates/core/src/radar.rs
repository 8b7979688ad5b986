//! Mapping-radar energy observations.
//!
//! For each steering direction `b` and range bin `s` the accumulated energy
//! is Gaussian with mean `E_bs + E_n` and variance `N0 (2 E_bs + E_n)`.
//! `E_bs` sums the echoes of the visible occupied cells whose round-trip
//! delay falls in bin `s`, each weighted by the two-way array gain toward
//! that cell when the beam points at `θ_b`.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::{sample_gaussian, SimRng};
use crate::scene::{los_blocked_on, Pose, Scenario, SPEED_OF_LIGHT};

/// Ratio between the half-power full width and the standard deviation of a Gaussian.
const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Steerable array with a Gaussian main lobe and no sidelobes.
///
/// Boresight power gain is `N`; the half-power width equals the steering
/// pitch `2π / N_rot`, so consecutive beams cross at -3 dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayModel {
    pub n_elements: usize,
    pub n_rot: usize,
}

impl ArrayModel {
    pub fn steering_pitch(&self) -> f64 {
        TAU / self.n_rot as f64
    }

    /// Steering direction of row `b`, counter-clockwise from east.
    pub fn steering_angle(&self, b: usize) -> f64 {
        self.steering_pitch() * b as f64
    }

    pub fn beam_sigma(&self) -> f64 {
        self.steering_pitch() / FWHM_PER_SIGMA
    }

    pub fn half_power_width(&self) -> f64 {
        self.steering_pitch()
    }
}

/// Wrap an angle to `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Power gain `G(θ̃) = N exp(-θ̃² / (2σ_b²))` for a steering offset in radians.
pub fn array_gain(model: &ArrayModel, steer_offset: f64) -> f64 {
    let t = wrap_angle(steer_offset);
    let sigma = model.beam_sigma();
    model.n_elements as f64 * (-(t * t) / (2.0 * sigma * sigma)).exp()
}

/// Round-trip delay bin `floor(2 d W / c)` of a reflector at `d` meters.
pub fn range_bin(distance_m: f64, bandwidth_hz: f64) -> usize {
    debug_assert!(distance_m >= 0.0);
    (2.0 * distance_m * bandwidth_hz / SPEED_OF_LIGHT).floor() as usize
}

/// Dense `[N_rot x N_bins]` matrix, row = steering index.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMatrix {
    pub n_rot: usize,
    pub n_bins: usize,
    pub data: Vec<f64>,
}

impl EnergyMatrix {
    pub fn filled(n_rot: usize, n_bins: usize, value: f64) -> Self {
        EnergyMatrix {
            n_rot,
            n_bins,
            data: vec![value; n_rot * n_bins],
        }
    }

    #[inline]
    pub fn get(&self, b: usize, s: usize) -> f64 {
        self.data[b * self.n_bins + s]
    }

    #[inline]
    pub fn get_mut(&mut self, b: usize, s: usize) -> &mut f64 {
        &mut self.data[b * self.n_bins + s]
    }

    pub fn row(&self, b: usize) -> &[f64] {
        &self.data[b * self.n_bins..(b + 1) * self.n_bins]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rot, self.n_bins)
    }
}

/// First two moments of every scan entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyStats {
    pub mean: EnergyMatrix,
    pub variance: EnergyMatrix,
}

/// One radar sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyScan {
    pub energy: EnergyMatrix,
    pub pose: Pose,
    pub k: usize,
    /// Entries whose Gaussian draw went negative and were clamped to zero.
    pub clamped: usize,
}

impl EnergyScan {
    /// CSV with one row per steering index: `steer,bin_0,...,bin_{N-1}`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["steer".to_string()];
        header.extend((0..self.energy.n_bins).map(|s| format!("bin_{s}")));
        w.write_record(&header)?;
        for b in 0..self.energy.n_rot {
            let mut rec = vec![b.to_string()];
            rec.extend(self.energy.row(b).iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("energy scan csv", e))?;
        Ok(())
    }
}

/// Echo of a single reflector: its range bin and the energy it deposits in each steering row.
#[derive(Debug, Clone, PartialEq)]
pub struct CellEcho {
    pub bin: usize,
    pub rows: Vec<f64>,
}

/// Precomputed radar constants for a scenario.
#[derive(Debug, Clone)]
pub struct RadarModel {
    pub array: ArrayModel,
    pub n_bins: usize,
    pub n_pulses: usize,
    /// `N0` in W/Hz.
    pub noise_psd: f64,
    /// Noise energy per bin `E_n`.
    pub noise_energy: f64,
    /// `N_p L0(f_r) W`: echo energy of a 1 m², 1 m reflector at unit gain.
    pub echo_scale: f64,
    pub bandwidth: f64,
}

impl RadarModel {
    pub fn new(s: &Scenario) -> Self {
        let r = &s.radio;
        let f = r.center_freq_hz;
        let c = SPEED_OF_LIGHT;
        // L0(f) W = P_t T_f c² / (f² (4π)³) * W with P_t = EIRP / W
        let l0_w = r.eirp_watts() * r.frame_time_s * c * c / (f * f * (4.0 * PI).powi(3));
        RadarModel {
            array: ArrayModel {
                n_elements: r.n_elements,
                n_rot: r.n_rot,
            },
            n_bins: r.n_bins(),
            n_pulses: r.n_pulses(),
            noise_psd: r.noise_psd(),
            noise_energy: r.noise_energy(),
            echo_scale: r.n_pulses() as f64 * l0_w,
            bandwidth: r.bandwidth_hz,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.array.n_rot, self.n_bins)
    }

    /// Variance of an entry whose signal energy is `signal`.
    #[inline]
    pub fn variance(&self, signal: f64) -> f64 {
        self.noise_psd * (2.0 * signal + self.noise_energy)
    }

    /// Echo of `cell` seen from `pose`, ignoring occlusion. `None` for the
    /// radar's own cell and for cells beyond the last range bin.
    pub fn cell_echo(&self, s: &Scenario, pose: &Pose, cell: usize) -> Option<CellEcho> {
        if cell == pose.cell {
            return None;
        }
        let d = s.grid.distance(pose.cell, cell);
        let bin = range_bin(d, self.bandwidth);
        if bin >= self.n_bins {
            return None;
        }
        let theta = s.grid.bearing(pose.cell, cell);
        let base = self.echo_scale * s.rcs[cell] / d.powi(4);
        let rows = (0..self.array.n_rot)
            .map(|b| {
                let g = array_gain(&self.array, theta - self.array.steering_angle(b));
                base * g * g
            })
            .collect();
        Some(CellEcho { bin, rows })
    }

    /// Signal part `E_bs` of the mean for occupancy `map` (no noise floor).
    /// Cells hidden behind other occupied cells of `map` contribute nothing.
    pub fn signal_energy(&self, s: &Scenario, map: &[bool], pose: &Pose) -> EnergyMatrix {
        let (n_rot, n_bins) = self.shape();
        let mut e = EnergyMatrix::filled(n_rot, n_bins, 0.0);
        for cell in (0..map.len()).filter(|&c| map[c]) {
            if los_blocked_on(&s.grid, map, pose.cell, cell) {
                continue;
            }
            if let Some(echo) = self.cell_echo(s, pose, cell) {
                for (b, v) in echo.rows.iter().enumerate() {
                    *e.get_mut(b, echo.bin) += v;
                }
            }
        }
        e
    }

    pub fn stats_from_signal(&self, signal: EnergyMatrix) -> EnergyStats {
        let mut variance = signal.clone();
        for v in variance.data.iter_mut() {
            *v = self.variance(*v);
        }
        let mut mean = signal;
        for v in mean.data.iter_mut() {
            *v += self.noise_energy;
        }
        EnergyStats { mean, variance }
    }
}

/// Mean and variance of every scan entry at `pose` for occupancy `map`.
pub fn expected_energy(s: &Scenario, map: &[bool], pose: &Pose) -> EnergyStats {
    let model = RadarModel::new(s);
    model.stats_from_signal(model.signal_energy(s, map, pose))
}

/// Noise applied when synthesizing a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanNoise {
    Gaussian,
    /// Scan equals the mean matrix.
    Off,
}

/// Draw a scan at `pose` from the true map.
pub fn synthesize_scan(s: &Scenario, pose: &Pose, k: usize, rng: &mut SimRng) -> EnergyScan {
    synthesize_scan_with(s, pose, k, rng, ScanNoise::Gaussian)
}

pub fn synthesize_scan_with(
    s: &Scenario,
    pose: &Pose,
    k: usize,
    rng: &mut SimRng,
    noise: ScanNoise,
) -> EnergyScan {
    let stats = expected_energy(s, &s.occupied, pose);
    let mut energy = stats.mean.clone();
    let mut clamped = 0;
    if noise == ScanNoise::Gaussian {
        for (e, var) in energy.data.iter_mut().zip(&stats.variance.data) {
            let draw = sample_gaussian(rng, *e, *var);
            if draw < 0.0 {
                clamped += 1;
            }
            *e = draw.max(0.0);
        }
    }
    if clamped > 0 {
        log::info!(
            "scan k={k} at cell {}: {clamped} negative energies clamped to 0",
            pose.cell
        );
    }
    EnergyScan {
        energy,
        pose: *pose,
        k,
        clamped,
    }
}
