use super::*;
use crate::mapper::init_belief;
use crate::numerics::ln_ncx2_pdf;
use crate::scene::Grid;
use proptest::prelude::*;

fn cfg_with_k(k: usize, pfa: f64) -> DetectorConfig {
    DetectorConfig {
        pfa_star: pfa,
        observation_time_s: k as f64 / (2.0 * 10e6),
        ..DetectorConfig::default()
    }
}

fn empirical_rate(cfg: &DetectorConfig, xi: f64, lambda: f64, n: usize, seed: u64) -> f64 {
    let mut rng = SimRng::new(seed);
    let dof = cfg.n_samples() as u32;
    let hits = (0..n)
        .filter(|_| sample_chi2(&mut rng, dof, lambda) > xi)
        .count();
    hits as f64 / n as f64
}

fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn default_sample_count() {
    let c = DetectorConfig::default();
    assert_eq!(c.n_samples(), 100);
    c.validate().unwrap();
}

#[test]
fn validation_names_fields() {
    let c = DetectorConfig {
        pfa_star: 1.0,
        ..DetectorConfig::default()
    };
    assert!(c
        .validate()
        .unwrap_err()
        .to_string()
        .contains("detector.pfa_star"));
    let c = DetectorConfig {
        observation_time_s: 0.5e-7,
        ..DetectorConfig::default()
    };
    assert!(c
        .validate()
        .unwrap_err()
        .to_string()
        .contains("observation_time_s"));
}

#[test]
fn threshold_two_samples_half() {
    let c = cfg_with_k(2, 0.5);
    let xi = threshold_from_pfa(&c).unwrap();
    assert!((xi - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn threshold_roundtrip() {
    for k in [2, 10, 100, 1000] {
        for p in [0.5, 0.1, 1e-2, 1e-3, 1e-6] {
            let c = cfg_with_k(k, p);
            let xi = threshold_from_pfa(&c).unwrap();
            assert!(
                (pfa_theoretical(&c, xi) - p).abs() < 1e-9 * p.max(1e-3),
                "k={k} p={p} got {}",
                pfa_theoretical(&c, xi)
            );
        }
    }
}

#[test]
fn pfa_at_zero_and_monotone() {
    let c = DetectorConfig::default();
    assert_eq!(pfa_theoretical(&c, 0.0), 1.0);
    let mut prev = 1.0;
    for i in 1..400 {
        let p = pfa_theoretical(&c, i as f64);
        assert!(p <= prev);
        prev = p;
    }
}

#[test]
fn empirical_far_matches_design() {
    let c = cfg_with_k(200, 1e-3);
    let xi = threshold_from_pfa(&c).unwrap();
    let n = 1_000_000;
    let far = empirical_rate(&c, xi, 0.0, n, 21);
    assert!((far - 1e-3).abs() < three_sigma(1e-3, n), "far {far}");
}

#[test]
fn empirical_pd_matches_marcum() {
    let c = DetectorConfig::default();
    let xi = threshold_from_pfa(&c).unwrap();
    let lambda = 60.0;
    let pd = pd_theoretical(&c, xi, lambda);
    let n = 1_000_000;
    let cdr = empirical_rate(&c, xi, lambda, n, 22);
    assert!((cdr - pd).abs() < three_sigma(pd, n), "cdr {cdr} pd {pd}");
}

#[test]
fn pd_limits() {
    let c = DetectorConfig::default();
    let xi = threshold_from_pfa(&c).unwrap();
    assert_eq!(pd_theoretical(&c, xi, 0.0), pfa_theoretical(&c, xi));
    assert!(pd_theoretical(&c, xi, 1e6) >= 1.0 - 1e-12);
    // P_e with P1 = 1 is the miss probability
    let pd = pd_theoretical(&c, xi, 50.0);
    assert_eq!(
        1.0 - error_probability(pd, pfa_theoretical(&c, xi), 1.0),
        pd
    );
}

#[test]
fn inverse_square_law() {
    let c = DetectorConfig::default();
    let a = friis_lambda(&c, 20.0);
    let b = friis_lambda(&c, 10.0);
    assert!((b / a - 4.0).abs() < 1e-12);
}

/// Link budget reproduces the distance ordering of the ROC curves at FAR 1e-2.
#[test]
fn calibrated_link_budget() {
    let c = DetectorConfig::default();
    let xi = threshold_for(&c, 1e-2).unwrap();
    let pd10 = pd_theoretical(&c, xi, lambda_at_distance(&c, 10.0));
    let pd35 = pd_theoretical(&c, xi, lambda_at_distance(&c, 35.0));
    assert!(pd10 >= 0.99, "pd(10 m) = {pd10}");
    assert!(pd35 <= 0.9, "pd(35 m) = {pd35}");
}

#[test]
fn blocked_or_far_target_is_silent() {
    let s = Scenario::reference(100);
    // O3 occupies (4,2),(5,2); (3,2) -> (6,2) passes through it
    let from = s.pose(s.grid.index(3, 2)).unwrap();
    assert_eq!(noncentrality(&s, &from, s.grid.index(6, 2)), 0.0);
    assert!(noncentrality(&s, &from, s.grid.index(3, 0)) > 0.0);

    let c = DetectorConfig {
        max_range_m: 2.0,
        ..DetectorConfig::default()
    };
    let grid = s.grid;
    let free = vec![false; 100];
    assert_eq!(noncentrality_on(&c, &grid, &free, 0, grid.index(5, 0)), 0.0);
    // own cell is clamped to half a cell
    let own = noncentrality_on(&c, &grid, &free, 0, 0);
    assert!((own - friis_lambda(&c, 0.5)).abs() < 1e-9 * own);
}

#[test]
fn sensing_examples() {
    let s = Scenario::reference(100);
    let pose = s.start_pose();
    let xi = threshold_from_pfa(&s.detector).unwrap();
    let a = sense_and_decide(&s, &pose, 3, xi, &mut SimRng::new(4));
    let b = sense_and_decide(&s, &pose, 3, xi, &mut SimRng::new(4));
    assert_eq!(a, b);
    assert_eq!(a.decision == Decision::D1, a.statistic > xi);
    assert_eq!(a.k, 3);

    let mut rng = SimRng::new(5);
    for _ in 0..1000 {
        let r = sense_with_lambda(&s.detector, &pose, 0, xi, 1e7, &mut rng);
        assert_eq!(r.decision, Decision::D1);
    }
    let n = 1_000_000;
    let d1 = (0..n)
        .filter(|_| {
            sense_with_lambda(&s.detector, &pose, 0, xi, 0.0, &mut rng).decision == Decision::D1
        })
        .count() as f64
        / n as f64;
    assert!((d1 - 1e-3).abs() < three_sigma(1e-3, n));
}

#[test]
fn symmetric_pose_keeps_uniform_belief() {
    // 3x1 corridor, agent in the middle: both ends are at the same distance
    let s_text = r#"{
        "schema_version": 1,
        "grid": {"width": 3, "height": 1},
        "occupied": [],
        "radio": {"eirp_dbm": 5, "noise_figure_db": 4, "bandwidth_hz": 1e9,
                  "center_freq_hz": 60e9, "scan_time_s": 80e-6, "frame_time_s": 30e-9,
                  "n_rot": 20, "n_elements": 16},
        "detector": {"pfa_star": 1e-3, "target_eirp_dbm": -40, "target_freq_hz": 2.4e9,
                     "bandwidth_hz": 1e7, "observation_time_s": 5e-6, "noise_figure_db": 4,
                     "max_range_m": 50},
        "mission": {"uav_start": 1, "target_cell": 0}
    }"#;
    let s = Scenario::from_json_str(s_text).unwrap();
    let pose = s.start_pose();
    let xi = threshold_from_pfa(&s.detector).unwrap();
    let rec = sense_and_decide(&s, &pose, 0, xi, &mut SimRng::new(1));
    let tb = TargetBelief {
        mass: vec![0.5, 0.0, 0.5],
    };
    let post = update_target_belief(&tb, &rec, &s, &init_belief(&s));
    assert!((post.mass[0] - 0.5).abs() < 1e-12);
    assert!((post.mass[2] - 0.5).abs() < 1e-12);
}

/// Direct Bayes on three cells at distances 1, 2 and 4 cells.
#[test]
fn strong_statistic_pulls_mass_closer() {
    let grid = Grid {
        width: 5,
        height: 1,
        cell_size: 1.0,
    };
    let cfg = DetectorConfig {
        target_eirp_dbm: -60.0,
        ..DetectorConfig::default()
    };
    let map = vec![false; 5];
    let cells = [1usize, 2, 4];
    let lambdas: Vec<f64> = cells
        .iter()
        .map(|&c| noncentrality_on(&cfg, &grid, &map, 0, c))
        .collect();
    assert!(lambdas[0] > lambdas[1] && lambdas[1] > lambdas[2]);

    let statistic = 100.0 + lambdas[0];
    // independent evaluation through the Poisson mixture of central densities
    let pdf = |x: f64, l: f64| -> f64 {
        let mut acc = 0.0;
        for j in 0..2000 {
            let jf = j as f64;
            let dof = 100.0 + 2.0 * jf;
            let ln_w = -l / 2.0 + jf * (l / 2.0).ln() - crate::numerics::ln_gamma(jf + 1.0);
            let ln_c = (dof / 2.0 - 1.0) * x.ln()
                - x / 2.0
                - (dof / 2.0) * std::f64::consts::LN_2
                - crate::numerics::ln_gamma(dof / 2.0);
            acc += (ln_w + ln_c).exp();
        }
        acc
    };
    let w: Vec<f64> = lambdas.iter().map(|&l| pdf(statistic, l) / 3.0).collect();
    let z: f64 = w.iter().sum();
    let direct: Vec<f64> = w.iter().map(|v| v / z).collect();

    let mut prior = vec![0.0; 5];
    for &c in &cells {
        prior[c] = 1.0 / 3.0;
    }
    let tb = TargetBelief {
        mass: prior.clone(),
    };
    let ll = target_belief_ll(&cfg, &grid, &map, statistic);
    let post = tb.reweight(&ll, &map).unwrap();
    for (i, &c) in cells.iter().enumerate() {
        assert!((post.mass[c] - direct[i]).abs() < 1e-9, "cell {c}");
    }
    let mean_d = |m: &[f64]| cells.iter().map(|&c| m[c] * c as f64).sum::<f64>();
    assert!(mean_d(&post.mass) < mean_d(&prior));
}

fn target_belief_ll(cfg: &DetectorConfig, grid: &Grid, map: &[bool], statistic: f64) -> Vec<f64> {
    (0..grid.cell_count())
        .map(|c| {
            ln_ncx2_pdf(
                statistic,
                cfg.n_samples() as f64,
                noncentrality_on(cfg, grid, map, 0, c),
            )
        })
        .collect()
}

#[test]
fn degenerate_update_keeps_prior() {
    let s = Scenario::reference(16);
    let tb = TargetBelief::point(100, s.grid.index(5, 5));
    let mut b = init_belief(&s);
    b.log_odds[s.grid.index(5, 5)] = 10.0;
    let rec = DetectionRecord {
        statistic: 50.0,
        threshold: 1.0,
        decision: Decision::D1,
        pose: s.start_pose(),
        k: 0,
    };
    assert_eq!(update_target_belief(&tb, &rec, &s, &b), tb);
}

#[test]
fn belief_csv_rows() {
    let s = Scenario::reference(16);
    let tb = TargetBelief::uniform(100);
    let mut buf = Vec::new();
    tb.write_csv(&s.grid, 2, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert!(text.lines().nth(1).unwrap().starts_with("2,0,0,0,"));
}

#[test]
fn roc_table_properties() {
    let cfg = DetectorConfig::default();
    let roc = RocConfig {
        trials: 20_000,
        ..RocConfig::default()
    };
    let t = run_roc(&cfg, &roc, 9, 1).unwrap();
    assert_eq!(t.rows.len(), 9 * 13);
    let first = t.distances()[0];
    let far0: Vec<f64> = t.curve(first).map(|r| r.far).collect();
    for d in t.distances() {
        let far: Vec<f64> = t.curve(d).map(|r| r.far).collect();
        assert_eq!(far, far0);
    }
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let back = RocTable::read_csv(buf.as_slice(), t.trials).unwrap();
    assert_eq!(back, t);
    assert!(RocConfig {
        trials: 0,
        ..RocConfig::default()
    }
    .validate()
    .is_err());
}

#[test]
fn roc_independent_of_workers() {
    let cfg = DetectorConfig::default();
    let roc = RocConfig {
        trials: 10_000,
        ..RocConfig::default()
    };
    assert_eq!(
        run_roc(&cfg, &roc, 3, 1).unwrap(),
        run_roc(&cfg, &roc, 3, 4).unwrap()
    );
}

proptest! {
    #[test]
    fn pd_dominates_pfa(xi in 1.0f64..400.0, lambda in 0.0f64..500.0) {
        let c = DetectorConfig::default();
        let pd = pd_theoretical(&c, xi, lambda);
        let pfa = pfa_theoretical(&c, xi);
        if lambda == 0.0 {
            prop_assert_eq!(pd, pfa);
        } else {
            prop_assert!(pd >= pfa - 1e-15);
        }
    }

    #[test]
    fn belief_stays_normalized(stats in proptest::collection::vec(50.0f64..400.0, 1..6), start in 0usize..100) {
        let s = Scenario::reference(16);
        prop_assume!(s.is_free(start));
        let b = init_belief(&s);
        let mut tb = TargetBelief::uniform(100);
        for (k, &st) in stats.iter().enumerate() {
            let rec = DetectionRecord {
                statistic: st,
                threshold: 1.0,
                decision: Decision::D1,
                pose: s.pose(start).unwrap(),
                k,
            };
            tb = update_target_belief(&tb, &rec, &s, &b);
            let total: f64 = tb.mass.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(tb.mass.iter().all(|&m| m >= 0.0));
        }
    }

    #[test]
    fn sequential_updates_compose(a in 50.0f64..300.0, b in 50.0f64..300.0) {
        let s = Scenario::reference(16);
        let map = vec![false; 100];
        let tb = TargetBelief::uniform(100);
        let from = s.start_pose().cell;
        let la = target_log_likelihood(&s.detector, &s.grid, &map, from, a);
        let lb = target_log_likelihood(&s.detector, &s.grid, &map, from, b);
        let two = tb.reweight(&la, &map).unwrap().reweight(&lb, &map).unwrap();
        let sum: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| x + y).collect();
        let one = tb.reweight(&sum, &map).unwrap();
        for c in 0..100 {
            prop_assert!((two.mass[c] - one.mass[c]).abs() < 1e-12);
        }
    }
}
