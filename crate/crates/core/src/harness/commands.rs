use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use super::artifacts::{ArtifactSink, RunManifest, ScenarioSource};
use super::mapping::{run_fixed_trajectory, write_accuracy};
use super::mission::{write_trace, Mission};
use crate::detector::run_roc;
use crate::error::{Error, Result};
use crate::mapper::BeliefMap;
use crate::radar::ScanNoise;
use crate::scene::Scenario;

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn json_bytes(v: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn write_belief(sink: &mut ArtifactSink, s: &Scenario, b: &BeliefMap) -> Result<()> {
    sink.write_with(&format!("belief/k{:03}.csv", b.k), |buf| {
        b.write_csv(&s.grid, buf)
    })?;
    sink.write_with(&format!("belief/k{:03}.pgm", b.k), |buf| {
        b.write_pgm(&s.grid, buf)
    })
}

fn write_trajectory(sink: &mut ArtifactSink, s: &Scenario, cells: &[usize]) -> Result<()> {
    sink.write_with("trajectory.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["k", "cell", "x", "y"])?;
        for (k, &c) in cells.iter().enumerate() {
            let (x, y) = s.grid.coords(c);
            w.write_record([k.to_string(), c.to_string(), x.to_string(), y.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("trajectory csv", e))
    })
}

/// Run one planned mission and write its artifacts under `out`.
pub fn cmd_mission(source: &ScenarioSource, seed: u64, out: &Path) -> Result<RunManifest> {
    let s = source.parse()?;
    let started = Instant::now();
    let mut mission = Mission::new(s.clone(), seed);
    while let Some(row) = mission.advance()? {
        log::info!(
            "k={:2} {:>5} -> ({}, {}) eps={} H={:.3} {}",
            row.k,
            row.action.name(),
            row.x,
            row.y,
            row.epsilon,
            row.entropy,
            row.decision
        );
    }
    let outcome = mission.outcome();

    let mut sink = ArtifactSink::create(out)?;
    let cells: Vec<usize> = mission.history().iter().map(|st| st.pose.cell).collect();
    write_trajectory(&mut sink, &s, &cells)?;
    sink.write_with("trace.csv", |buf| write_trace(mission.trace(), buf))?;
    for st in mission.history() {
        write_belief(&mut sink, &s, &st.belief)?;
        sink.write_with(&format!("target/k{:03}.csv", st.k), |buf| {
            st.target.write_csv(&s.grid, st.k, buf)
        })?;
    }
    let summary = json!({
        "steps": outcome.steps,
        "initial_distance_m": outcome.initial_distance,
        "final_distance_m": outcome.final_distance,
        "final_entropy_nats": outcome.final_entropy,
        "max_entropy_nats": s.cell_count() as f64 * std::f64::consts::LN_2,
    });
    sink.write("summary.json", &json_bytes(&summary)?)?;
    sink.finish(
        "mission",
        source,
        seed,
        params(&[("mission_time", json!(s.mission_time()))]),
        json!({ "wall_clock_s": started.elapsed().as_secs_f64() }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RocOptions {
    /// Overrides the scenario's trial count.
    pub trials: Option<usize>,
    pub workers: usize,
}

impl Default for RocOptions {
    fn default() -> Self {
        RocOptions {
            trials: None,
            workers: 1,
        }
    }
}

/// Monte-Carlo ROC for the scenario's detector and distance list.
pub fn cmd_roc(
    source: &ScenarioSource,
    seed: u64,
    out: &Path,
    opts: RocOptions,
) -> Result<RunManifest> {
    let s = source.parse()?;
    let mut roc = s.roc.clone();
    if let Some(t) = opts.trials {
        roc.trials = t;
    }
    roc.validate()?;
    let started = Instant::now();
    let table = run_roc(&s.detector, &roc, seed, opts.workers)?;
    let summary = table.summary(1e-2);
    for c in &summary.curves {
        log::info!(
            "d={:>5} m  max|CDR-PD|={:.2e} ({:.2} sigma)  max|FAR-PFA|={:.2e} ({:.2} sigma)",
            c.distance_m,
            c.max_abs_cdr,
            c.max_sigma_cdr,
            c.max_abs_far,
            c.max_sigma_far
        );
    }
    log::info!(
        "CDR ordering at FAR {:.4}: {}",
        summary.ordering_far,
        if summary.ordering_ok { "pass" } else { "FAIL" }
    );

    let mut sink = ArtifactSink::create(out)?;
    sink.write_with("roc.csv", |buf| table.write_csv(buf))?;
    sink.write("roc_summary.json", &json_bytes(&summary)?)?;
    sink.finish(
        "roc",
        source,
        seed,
        params(&[("trials", json!(roc.trials))]),
        json!({ "wall_clock_s": started.elapsed().as_secs_f64(), "workers": opts.workers }),
    )
}

/// Mapping only, along a named waypoint path of the scenario.
pub fn cmd_map_fixed(
    source: &ScenarioSource,
    trajectory: &str,
    seed: u64,
    out: &Path,
    noise: ScanNoise,
) -> Result<RunManifest> {
    let s = source.parse()?;
    let cells = s.trajectory_cells(trajectory)?;
    let started = Instant::now();
    let run = run_fixed_trajectory(&s, &cells, seed, noise)?;
    let rows = run.accuracy_rows(&s);
    let last = rows.last().expect("prior row");
    log::info!(
        "{trajectory}: {} scans, accuracy {:.3}, entropy {:.3} nats",
        cells.len(),
        last.accuracy,
        last.entropy
    );

    let mut sink = ArtifactSink::create(out)?;
    write_trajectory(&mut sink, &s, &cells)?;
    for b in &run.beliefs {
        write_belief(&mut sink, &s, b)?;
    }
    sink.write_with("accuracy.csv", |buf| write_accuracy(&rows, buf))?;
    let summary = json!({
        "trajectory": trajectory,
        "scans": cells.len(),
        "final_accuracy": last.accuracy,
        "final_entropy_nats": last.entropy,
    });
    sink.write("summary.json", &json_bytes(&summary)?)?;
    let noise_label = match noise {
        ScanNoise::Gaussian => "gaussian",
        ScanNoise::Off => "off",
    };
    sink.finish(
        "map-fixed",
        source,
        seed,
        params(&[
            ("trajectory", json!(trajectory)),
            ("noise", json!(noise_label)),
        ]),
        json!({ "wall_clock_s": started.elapsed().as_secs_f64() }),
    )
}
