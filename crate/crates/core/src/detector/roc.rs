//! Monte-Carlo receiver operating characteristic.
//!
//! Every trial draws one noise-only statistic and reuses its random numbers
//! for the target-present statistic at each distance, so all curves share a
//! common false-alarm column. Trials are grouped in fixed-size chunks, each
//! with its own substream; counts are integers, so the table does not depend
//! on how chunks are spread over threads.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{friis_lambda, pd_theoretical, pfa_theoretical, threshold_for, DetectorConfig};
use crate::error::{Error, Result};
use crate::numerics::{sample_central_chi2, SimRng};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RocConfig {
    pub distances_m: Vec<f64>,
    /// False-alarm probabilities whose thresholds form the sweep.
    pub pfa_grid: Vec<f64>,
    /// Trials per hypothesis.
    pub trials: usize,
}

impl Default for RocConfig {
    fn default() -> Self {
        RocConfig {
            distances_m: vec![10.0, 13.0, 14.0, 15.0, 17.0, 20.0, 25.0, 30.0, 35.0],
            pfa_grid: vec![
                1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.2, 0.5, 0.9,
            ],
            trials: 100_000,
        }
    }
}

impl RocConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("roc.trials", "must be at least 1"));
        }
        if self.distances_m.is_empty() {
            return Err(Error::invalid("roc.distances_m", "must not be empty"));
        }
        if self
            .distances_m
            .iter()
            .any(|&d| !(d > 0.0 && d.is_finite()))
        {
            return Err(Error::invalid(
                "roc.distances_m",
                "distances must be positive",
            ));
        }
        if self.pfa_grid.is_empty() {
            return Err(Error::invalid("roc.pfa_grid", "must not be empty"));
        }
        if self.pfa_grid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::invalid("roc.pfa_grid", "entries must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Noncentrality at `d` meters in free space, zero beyond the operating range.
pub fn lambda_at_distance(cfg: &DetectorConfig, d: f64) -> f64 {
    if d > cfg.max_range_m {
        0.0
    } else {
        friis_lambda(cfg, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocRow {
    pub distance_m: f64,
    pub threshold: f64,
    pub far: f64,
    pub cdr: f64,
    pub pfa_theory: f64,
    pub pd_theory: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocTable {
    pub trials: usize,
    pub rows: Vec<RocRow>,
}

/// Largest empirical-vs-theory gap of one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDeviation {
    pub distance_m: f64,
    pub max_abs_cdr: f64,
    /// Largest `|CDR - P_D|` in binomial standard deviations.
    pub max_sigma_cdr: f64,
    pub max_abs_far: f64,
    pub max_sigma_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocSummary {
    pub trials: usize,
    pub curves: Vec<CurveDeviation>,
    /// Operating point used for the distance ordering check.
    pub ordering_far: f64,
    /// Empirical CDR at `ordering_far`, one per distance in input order.
    pub ordering_cdr: Vec<f64>,
    /// CDR never increases with distance.
    pub ordering_ok: bool,
    /// Every deviation is within 3 binomial standard deviations.
    pub within_3_sigma: bool,
}

/// `|empirical - p|` in binomial standard deviations for `n` trials.
pub fn binomial_z(empirical: f64, p: f64, n: usize) -> f64 {
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    let gap = (empirical - p).abs();
    if sd > 0.0 {
        gap / sd
    } else if gap == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl RocTable {
    /// Rows belonging to one distance, in threshold order.
    pub fn curve(&self, distance_m: f64) -> impl Iterator<Item = &RocRow> {
        self.rows.iter().filter(move |r| r.distance_m == distance_m)
    }

    /// Distances in input order.
    pub fn distances(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.distance_m) {
                out.push(r.distance_m);
            }
        }
        out
    }

    /// Columns `distance_m,threshold,FAR,CDR,PFA_theory,PD_theory`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "distance_m",
            "threshold",
            "FAR",
            "CDR",
            "PFA_theory",
            "PD_theory",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.distance_m.to_string(),
                r.threshold.to_string(),
                r.far.to_string(),
                r.cdr.to_string(),
                r.pfa_theory.to_string(),
                r.pd_theory.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("roc csv", e))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R, trials: usize) -> Result<RocTable> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i]
                    .parse()
                    .map_err(|_| Error::invalid("roc csv", format!("bad number `{}`", &rec[i])))
            };
            rows.push(RocRow {
                distance_m: num(0)?,
                threshold: num(1)?,
                far: num(2)?,
                cdr: num(3)?,
                pfa_theory: num(4)?,
                pd_theory: num(5)?,
            });
        }
        Ok(RocTable { trials, rows })
    }

    /// Deviation report and distance ordering at the threshold whose
    /// empirical FAR is closest to `far` (ties go to the earlier threshold).
    pub fn summary(&self, far: f64) -> RocSummary {
        let distances = self.distances();
        let mut curves = Vec::new();
        let mut ordering_cdr = Vec::new();
        let mut ordering_far = f64::NAN;
        for &d in &distances {
            let mut dev = CurveDeviation {
                distance_m: d,
                max_abs_cdr: 0.0,
                max_sigma_cdr: 0.0,
                max_abs_far: 0.0,
                max_sigma_far: 0.0,
            };
            let mut best: Option<&RocRow> = None;
            for r in self.curve(d) {
                dev.max_abs_cdr = dev.max_abs_cdr.max((r.cdr - r.pd_theory).abs());
                dev.max_sigma_cdr =
                    dev.max_sigma_cdr
                        .max(binomial_z(r.cdr, r.pd_theory, self.trials));
                dev.max_abs_far = dev.max_abs_far.max((r.far - r.pfa_theory).abs());
                dev.max_sigma_far =
                    dev.max_sigma_far
                        .max(binomial_z(r.far, r.pfa_theory, self.trials));
                if best.is_none_or(|b| (r.far - far).abs() < (b.far - far).abs()) {
                    best = Some(r);
                }
            }
            if let Some(b) = best {
                ordering_cdr.push(b.cdr);
                ordering_far = b.far;
            }
            curves.push(dev);
        }
        let ordering_ok = ordering_cdr.windows(2).all(|w| w[1] <= w[0]);
        let within_3_sigma = curves
            .iter()
            .all(|c| c.max_sigma_cdr < 3.0 && c.max_sigma_far < 3.0);
        RocSummary {
            trials: self.trials,
            curves,
            ordering_far,
            ordering_cdr,
            ordering_ok,
            within_3_sigma,
        }
    }
}

/// Empirical and theoretical ROC curves for every configured distance.
pub fn run_roc(
    cfg: &DetectorConfig,
    roc: &RocConfig,
    seed: u64,
    workers: usize,
) -> Result<RocTable> {
    cfg.validate()?;
    roc.validate()?;
    let dof = cfg.n_samples() as u32;
    let thresholds = roc
        .pfa_grid
        .iter()
        .map(|&p| threshold_for(cfg, p))
        .collect::<Result<Vec<f64>>>()?;
    let lambdas: Vec<f64> = roc
        .distances_m
        .iter()
        .map(|&d| lambda_at_distance(cfg, d))
        .collect();
    let shifts: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    let n_t = thresholds.len();
    let n_d = shifts.len();
    let n_chunks = roc.trials.div_ceil(CHUNK);

    let count_chunk = |chunk: usize| -> Vec<u64> {
        // layout: [h0 counts (n_t)] then [h1 counts per distance (n_d x n_t)]
        let mut counts = vec![0u64; n_t * (1 + n_d)];
        let mut rng = SimRng::substream(seed, chunk as u64, 0);
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(roc.trials);
        for _ in start..end {
            let z = rng.standard_normal();
            let rest = sample_central_chi2(&mut rng, dof - 1);
            let h0 = z * z + rest;
            for (j, &xi) in thresholds.iter().enumerate() {
                counts[j] += u64::from(h0 > xi);
            }
            for (i, &a) in shifts.iter().enumerate() {
                let h1 = (z + a) * (z + a) + rest;
                let base = n_t * (1 + i);
                for (j, &xi) in thresholds.iter().enumerate() {
                    counts[base + j] += u64::from(h1 > xi);
                }
            }
        }
        counts
    };
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let counts = pool.install(|| {
        (0..n_chunks)
            .into_par_iter()
            .map(count_chunk)
            .reduce(|| vec![0u64; n_t * (1 + n_d)], merge)
    });

    let n = roc.trials as f64;
    let mut rows = Vec::with_capacity(n_t * n_d);
    for (i, &d) in roc.distances_m.iter().enumerate() {
        for (j, &xi) in thresholds.iter().enumerate() {
            rows.push(RocRow {
                distance_m: d,
                threshold: xi,
                far: counts[j] as f64 / n,
                cdr: counts[n_t * (1 + i) + j] as f64 / n,
                pfa_theory: pfa_theoretical(cfg, xi),
                pd_theory: pd_theoretical(cfg, xi, lambdas[i]),
            });
        }
    }
    Ok(RocTable {
        trials: roc.trials,
        rows,
    })
}
