//! Bayesian occupancy-grid estimation from energy scans.
//!
//! Cells are treated independently. For cell `i` the two hypotheses differ
//! only in the range column `s_i` where its echo lands, so the log-odds
//! increment is a sum over the steering rows of that column.

use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::binary_entropy_from_log_odds;
use crate::radar::{EnergyMatrix, EnergyScan, RadarModel};
use crate::scene::{Grid, Pose, Scenario};

/// Log-odds saturation bound.
pub const LOG_ODDS_LIMIT: f64 = 50.0;

/// Per-cell log-odds `ℓ(m_i = 1)` at time `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefMap {
    pub log_odds: Vec<f64>,
    pub k: usize,
}

impl BeliefMap {
    pub fn len(&self) -> usize {
        self.log_odds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_odds.is_empty()
    }

    /// `b(m_i = 1)`.
    pub fn occupied_prob(&self, cell: usize) -> f64 {
        logistic(self.log_odds[cell])
    }

    /// `b(m_i = 0)`.
    pub fn free_prob(&self, cell: usize) -> f64 {
        logistic(-self.log_odds[cell])
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_odds.iter().map(|&l| logistic(l)).collect()
    }

    /// Long-format CSV: `k,cell,x,y,log_odds,p_occupied`.
    pub fn write_csv<W: Write>(&self, grid: &Grid, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "cell", "x", "y", "log_odds", "p_occupied"])?;
        for (cell, &l) in self.log_odds.iter().enumerate() {
            let (x, y) = grid.coords(cell);
            w.write_record([
                self.k.to_string(),
                cell.to_string(),
                x.to_string(),
                y.to_string(),
                l.to_string(),
                logistic(l).to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("belief csv", e))?;
        Ok(())
    }

    /// Binary 8-bit PGM, north row first, 255 = certainly occupied.
    pub fn write_pgm<W: Write>(&self, grid: &Grid, out: W) -> Result<()> {
        write_pgm(grid, &self.probabilities(), out)
    }
}

/// Binary P5 image of per-cell values in `[0, 1]`.
pub fn write_pgm<W: Write>(grid: &Grid, values: &[f64], mut out: W) -> Result<()> {
    let mut buf = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    for y in (0..grid.height).rev() {
        for x in 0..grid.width {
            let v = values[grid.index(x, y)].clamp(0.0, 1.0);
            buf.push((v * 255.0).round() as u8);
        }
    }
    out.write_all(&buf).map_err(|e| Error::io("pgm", e))
}

fn logistic(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// Uniform prior: every log-odds is 0.
pub fn init_belief(s: &Scenario) -> BeliefMap {
    BeliefMap {
        log_odds: vec![0.0; s.cell_count()],
        k: 0,
    }
}

/// Measurement model of scan entries given the state of a single cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLikelihood {
    pub cell: usize,
    /// Range bin `s_i` of the cell's echo.
    pub bin: usize,
    pub n_bins: usize,
    /// Echo energy per steering row when the cell is occupied.
    pub signal: Vec<f64>,
    pub noise_energy: f64,
    pub noise_psd: f64,
}

impl CellLikelihood {
    fn signal_at(&self, b: usize, s: usize) -> f64 {
        if s == self.bin {
            self.signal[b]
        } else {
            0.0
        }
    }

    pub fn mean(&self, occupied: bool, b: usize, s: usize) -> f64 {
        let a = if occupied { self.signal_at(b, s) } else { 0.0 };
        self.noise_energy + a
    }

    pub fn variance(&self, occupied: bool, b: usize, s: usize) -> f64 {
        let a = if occupied { self.signal_at(b, s) } else { 0.0 };
        self.noise_psd * (2.0 * a + self.noise_energy)
    }

    /// Full `(mean, variance)` matrices under one hypothesis.
    pub fn matrices(&self, occupied: bool) -> (EnergyMatrix, EnergyMatrix) {
        let n_rot = self.signal.len();
        let mut mean = EnergyMatrix::filled(n_rot, self.n_bins, 0.0);
        let mut var = mean.clone();
        for b in 0..n_rot {
            for s in 0..self.n_bins {
                *mean.get_mut(b, s) = self.mean(occupied, b, s);
                *var.get_mut(b, s) = self.variance(occupied, b, s);
            }
        }
        (mean, var)
    }

    /// `ln p(e | m_i = 1) - ln p(e | m_i = 0)` over the entries where the hypotheses differ.
    pub fn log_likelihood_ratio(&self, energy: &EnergyMatrix) -> f64 {
        let m0 = self.noise_energy;
        let v0 = self.noise_psd * self.noise_energy;
        let mut acc = 0.0;
        for (b, &a) in self.signal.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let e = energy.get(b, self.bin);
            let m1 = m0 + a;
            let v1 = self.noise_psd * (2.0 * a + self.noise_energy);
            acc += (e - m0).powi(2) / (2.0 * v0) - (e - m1).powi(2) / (2.0 * v1)
                + 0.5 * (v0 / v1).ln();
        }
        acc
    }
}

/// Single-cell measurement model for `cell` seen from `pose`; `None` when the
/// cell is the radar's own or lies beyond the last range bin.
pub fn cell_likelihood_models(s: &Scenario, pose: &Pose, cell: usize) -> Option<CellLikelihood> {
    cell_likelihood_with(&RadarModel::new(s), s, pose, cell)
}

pub fn cell_likelihood_with(
    model: &RadarModel,
    s: &Scenario,
    pose: &Pose,
    cell: usize,
) -> Option<CellLikelihood> {
    let echo = model.cell_echo(s, pose, cell)?;
    Some(CellLikelihood {
        cell,
        bin: echo.bin,
        n_bins: model.n_bins,
        signal: echo.rows,
        noise_energy: model.noise_energy,
        noise_psd: model.noise_psd,
    })
}

/// Fold one scan into the belief.
pub fn update(b: &BeliefMap, scan: &EnergyScan, s: &Scenario, pose: &Pose) -> Result<BeliefMap> {
    update_with(&RadarModel::new(s), b, &scan.energy, s, pose)
}

/// Fold an energy matrix acquired at `pose` into the belief using a prebuilt radar model.
pub fn update_with(
    model: &RadarModel,
    b: &BeliefMap,
    energy: &EnergyMatrix,
    s: &Scenario,
    pose: &Pose,
) -> Result<BeliefMap> {
    if energy.shape() != model.shape() {
        return Err(Error::ShapeMismatch {
            expected: model.shape(),
            got: energy.shape(),
        });
    }
    if b.len() != s.cell_count() {
        return Err(Error::ShapeMismatch {
            expected: (s.cell_count(), 1),
            got: (b.len(), 1),
        });
    }
    let mut next = b.clone();
    for (cell, l) in next.log_odds.iter_mut().enumerate() {
        if let Some(m) = cell_likelihood_with(model, s, pose, cell) {
            let inc = m.log_likelihood_ratio(energy);
            *l = (*l + inc).clamp(-LOG_ODDS_LIMIT, LOG_ODDS_LIMIT);
        }
    }
    next.k = b.k + 1;
    Ok(next)
}

/// MAP occupancy: occupied iff `ℓ > 0`.
pub fn map_estimate(b: &BeliefMap) -> Vec<bool> {
    b.log_odds.iter().map(|&l| l > 0.0).collect()
}

/// Total map entropy in nats.
pub fn map_entropy(b: &BeliefMap) -> f64 {
    b.log_odds
        .iter()
        .map(|&l| binary_entropy_from_log_odds(l))
        .sum()
}

/// Fraction of cells whose MAP label matches `truth`.
pub fn classification_accuracy(b: &BeliefMap, truth: &[bool]) -> f64 {
    let est = map_estimate(b);
    let hits = est.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
