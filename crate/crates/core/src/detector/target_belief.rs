//! Belief over the target cell.
//!
//! The agent never observes the target position directly. Each detection
//! statistic reweights the candidate cells by the noncentral chi-square
//! density the statistic would have if the target sat in that cell, with
//! line of sight judged on the agent's own MAP map.

use std::io::Write;

use super::{noncentrality_on, DetectionRecord, DetectorConfig};
use crate::error::{Error, Result};
use crate::mapper::{map_estimate, BeliefMap};
use crate::numerics::ln_ncx2_pdf;
use crate::scene::{Grid, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct TargetBelief {
    pub mass: Vec<f64>,
}

impl TargetBelief {
    pub fn uniform(n_cells: usize) -> Self {
        TargetBelief {
            mass: vec![1.0 / n_cells as f64; n_cells],
        }
    }

    pub fn point(n_cells: usize, cell: usize) -> Self {
        let mut mass = vec![0.0; n_cells];
        mass[cell] = 1.0;
        TargetBelief { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Most probable cell; lowest index on ties.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (c, &m) in self.mass.iter().enumerate() {
            if m > self.mass[best] {
                best = c;
            }
        }
        best
    }

    /// Multiply by `exp(log_lik)`, zero the `excluded` cells and renormalize.
    /// Returns `None` when no mass survives.
    pub fn reweight(&self, log_lik: &[f64], excluded: &[bool]) -> Option<TargetBelief> {
        let logs: Vec<f64> = self
            .mass
            .iter()
            .zip(log_lik)
            .zip(excluded)
            .map(|((&p, &l), &x)| {
                if x || p <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    p.ln() + l
                }
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return None;
        }
        let w: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
        let z: f64 = w.iter().sum();
        if !(z > 0.0 && z.is_finite()) {
            return None;
        }
        Some(TargetBelief {
            mass: w.into_iter().map(|v| v / z).collect(),
        })
    }

    /// Long-format CSV: `k,cell,x,y,mass`.
    pub fn write_csv<W: Write>(&self, grid: &Grid, k: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "cell", "x", "y", "mass"])?;
        for (cell, &m) in self.mass.iter().enumerate() {
            let (x, y) = grid.coords(cell);
            w.write_record([
                k.to_string(),
                cell.to_string(),
                x.to_string(),
                y.to_string(),
                m.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("target belief csv", e))?;
        Ok(())
    }
}

/// Log-likelihood of the observed statistic for every candidate target cell.
pub fn target_log_likelihood(
    cfg: &DetectorConfig,
    grid: &Grid,
    map: &[bool],
    from: usize,
    statistic: f64,
) -> Vec<f64> {
    let dof = cfg.n_samples() as f64;
    (0..grid.cell_count())
        .map(|c| ln_ncx2_pdf(statistic, dof, noncentrality_on(cfg, grid, map, from, c)))
        .collect()
}

/// Bayesian update of the target belief after one detection.
pub fn update_target_belief(
    tb: &TargetBelief,
    rec: &DetectionRecord,
    s: &Scenario,
    belief_map: &BeliefMap,
) -> TargetBelief {
    let map = map_estimate(belief_map);
    let ll = target_log_likelihood(&s.detector, &s.grid, &map, rec.pose.cell, rec.statistic);
    match tb.reweight(&ll, &map) {
        Some(next) => next,
        None => {
            log::warn!(
                "target belief update at k={} left no mass; keeping the prior",
                rec.k
            );
            tb.clone()
        }
    }
}
