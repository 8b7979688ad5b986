use std::io::Write;

use crate::error::{Error, Result};
use crate::mapper::{classification_accuracy, init_belief, map_entropy, update_with, BeliefMap};
use crate::numerics::SimRng;
use crate::radar::{synthesize_scan_with, RadarModel, ScanNoise};
use crate::scene::Scenario;

/// Belief after each scan of a fixed path; `beliefs[0]` is the prior.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedRun {
    pub cells: Vec<usize>,
    pub beliefs: Vec<BeliefMap>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub k: usize,
    pub cell: Option<usize>,
    pub accuracy: f64,
    pub entropy: f64,
}

impl FixedRun {
    pub fn final_belief(&self) -> &BeliefMap {
        self.beliefs.last().expect("prior is always present")
    }

    pub fn accuracy(&self, s: &Scenario) -> f64 {
        classification_accuracy(self.final_belief(), &s.occupied)
    }

    pub fn accuracy_rows(&self, s: &Scenario) -> Vec<AccuracyRow> {
        self.beliefs
            .iter()
            .enumerate()
            .map(|(k, b)| AccuracyRow {
                k,
                cell: k.checked_sub(1).map(|i| self.cells[i]),
                accuracy: classification_accuracy(b, &s.occupied),
                entropy: map_entropy(b),
            })
            .collect()
    }
}

pub fn write_accuracy<W: Write>(rows: &[AccuracyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "cell", "accuracy", "entropy"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.cell.map(|c| c.to_string()).unwrap_or_default(),
            r.accuracy.to_string(),
            r.entropy.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("accuracy csv", e))?;
    Ok(())
}

/// Scan at every cell of `cells` in order and fold each scan into the map.
/// Scan `k` (1-based) uses substream `(k, 1)` of the seed.
pub fn run_fixed_trajectory(
    s: &Scenario,
    cells: &[usize],
    seed: u64,
    noise: ScanNoise,
) -> Result<FixedRun> {
    let radar = RadarModel::new(s);
    let mut beliefs = vec![init_belief(s)];
    for (i, &cell) in cells.iter().enumerate() {
        let k = i + 1;
        let pose = s.pose(cell)?;
        let mut rng = SimRng::substream(seed, k as u64, 1);
        let scan = synthesize_scan_with(s, &pose, k, &mut rng, noise);
        let next = update_with(&radar, beliefs.last().unwrap(), &scan.energy, s, &pose)?;
        beliefs.push(next);
    }
    Ok(FixedRun {
        cells: cells.to_vec(),
        beliefs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_path_keeps_prior() {
        let s = Scenario::reference(100);
        let run = run_fixed_trajectory(&s, &[], 1, ScanNoise::Gaussian).unwrap();
        assert_eq!(run.beliefs.len(), 1);
        let free = s.occupied.iter().filter(|o| !**o).count() as f64 / 100.0;
        assert_eq!(run.accuracy(&s), free);
    }

    #[test]
    fn noise_free_runs_are_seed_independent() {
        let s = Scenario::reference(16);
        let cells = s.trajectory_cells("T1").unwrap();
        let a = run_fixed_trajectory(&s, &cells, 1, ScanNoise::Off).unwrap();
        let b = run_fixed_trajectory(&s, &cells, 2, ScanNoise::Off).unwrap();
        assert_eq!(a, b);
    }
}
