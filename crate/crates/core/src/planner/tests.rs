use super::*;
use crate::detector::{pd_theoretical, pfa_theoretical, threshold_from_pfa};
use crate::mapper::{map_entropy, map_estimate, update};
use crate::radar::{expected_energy, EnergyScan};
use proptest::prelude::*;

fn toy(
    width: usize,
    height: usize,
    occ: &[(usize, usize)],
    start: usize,
    target: usize,
) -> Scenario {
    Scenario::reference(16)
        .relayout(width, height, occ, start, target)
        .unwrap()
}

#[test]
fn epsilon_schedule() {
    assert_eq!(epsilon(2, 13), 0.8);
    assert_eq!(epsilon(3, 13), 0.8);
    assert_eq!(epsilon(4, 13), 0.4);
    assert_eq!(epsilon(5, 13), 0.4);
    assert_eq!(epsilon(6, 13), 0.4);
    assert_eq!(epsilon(7, 13), 0.0);
    // exact boundaries when T_M is divisible
    assert_eq!(epsilon(2, 8), 0.4);
    assert_eq!(epsilon(4, 8), 0.0);
}

#[test]
fn config_validation() {
    let mut c = PlannerConfig::default();
    c.validate().unwrap();
    c.discount = 1.5;
    assert!(c
        .validate()
        .unwrap_err()
        .to_string()
        .contains("planner.discount"));
    let c = PlannerConfig {
        w_detection: 0.0,
        w_map: 0.0,
        ..PlannerConfig::default()
    };
    assert!(c.validate().is_err());
    let c = PlannerConfig {
        horizon: 0,
        ..PlannerConfig::default()
    };
    assert!(c
        .validate()
        .unwrap_err()
        .to_string()
        .contains("planner.horizon"));
}

#[test]
fn converged_belief_hits_the_cap() {
    let s = toy(3, 3, &[], 4, 8);
    let mut st = AgentState::initial(&s);
    for (c, l) in st.belief.log_odds.iter_mut().enumerate() {
        *l = if c % 2 == 0 { 50.0 } else { -50.0 };
    }
    let pose = s.pose(1).unwrap();
    let r = predicted_map_reward(&st, &pose, &s).unwrap();
    let h0 = 9.0 * std::f64::consts::LN_2;
    assert_eq!(r, h0 / s.planner.entropy_floor);
}

/// Recomputes the certainty-equivalent update from the radar and mapper primitives.
#[test]
fn map_reward_matches_recomputation() {
    let s = toy(3, 3, &[(2, 2)], 0, 6);
    let mut st = AgentState::initial(&s);
    st.belief.log_odds[8] = 2.0;
    st.belief.log_odds[5] = -1.0;
    let pose = s.pose(1).unwrap();
    let map = map_estimate(&st.belief);
    let scan = EnergyScan {
        energy: expected_energy(&s, &map, &pose).mean,
        pose,
        k: 1,
        clamped: 0,
    };
    let nb = update(&st.belief, &scan, &s, &pose).unwrap();
    let expected = 9.0 * std::f64::consts::LN_2 / map_entropy(&nb).max(1e-6);
    assert_eq!(predicted_map_reward(&st, &pose, &s).unwrap(), expected);
}

#[test]
fn unchanged_information_keeps_reward() {
    // every cell of a 1x2 corridor other than the agent's own is already certain
    let s = toy(2, 1, &[], 0, 1);
    let mut st = AgentState::initial(&s);
    st.belief.log_odds[1] = -50.0;
    let pose = s.pose(0).unwrap();
    let before = 2.0 * std::f64::consts::LN_2 / map_entropy(&st.belief);
    let r = predicted_map_reward(&st, &pose, &s).unwrap();
    assert!((r - before).abs() < 1e-12 * before);
}

#[test]
fn detection_reward_examples() {
    let s = toy(5, 5, &[(2, 3)], 12, 24);
    let xi = threshold_from_pfa(&s.detector).unwrap();
    let mut st = AgentState::initial(&s);
    let pose = s.pose(12).unwrap();

    // point mass on a visible cell
    st.target = TargetBelief::point(25, 4);
    let lambda = crate::detector::noncentrality_on(&s.detector, &s.grid, &[false; 25], 12, 4);
    let r = predicted_detection_reward(&st, &pose, &s).unwrap();
    assert_eq!(r, pd_theoretical(&s.detector, xi, lambda));

    // two-cell mixture
    st.target.mass = vec![0.0; 25];
    st.target.mass[4] = 0.5;
    st.target.mass[20] = 0.5;
    let l20 = crate::detector::noncentrality_on(&s.detector, &s.grid, &[false; 25], 12, 20);
    let mean =
        0.5 * pd_theoretical(&s.detector, xi, lambda) + 0.5 * pd_theoretical(&s.detector, xi, l20);
    let r = predicted_detection_reward(&st, &pose, &s).unwrap();
    assert!((r - mean).abs() < 1e-15);

    // target hidden behind a believed obstacle
    st.target = TargetBelief::point(25, 22);
    st.belief.log_odds[17] = 5.0;
    let r = predicted_detection_reward(&st, &pose, &s).unwrap();
    assert!((r - s.detector.pfa_star).abs() < 1e-9 * s.detector.pfa_star);
    assert_eq!(r, pfa_theoretical(&s.detector, xi));
}

#[test]
fn horizon_one_is_immediate_reward() {
    let mut s = toy(4, 4, &[(2, 2)], 5, 15);
    s.planner.horizon = 1;
    let st = AgentState::initial(&s);
    for v in q_lookahead(&st, &s).unwrap() {
        assert_eq!(v.q, v.r_detection + v.r_map);
    }
}

#[test]
fn zero_discount_is_greedy() {
    let mut s = toy(4, 4, &[(2, 2)], 5, 15);
    s.planner.discount = 0.0;
    let st = AgentState::initial(&s);
    let values = q_lookahead(&st, &s).unwrap();
    let immediate: Vec<ActionValue> = values
        .iter()
        .map(|v| ActionValue {
            q: v.r_detection + v.r_map,
            ..*v
        })
        .collect();
    assert_eq!(greedy(&values), greedy(&immediate));
}

fn brute_force(st: &AgentState, s: &Scenario, first: Action) -> f64 {
    fn walk(s: &Scenario, st: &AgentState, path: &mut Vec<Pose>, out: &mut Vec<Vec<Pose>>) {
        if path.len() == s.planner.horizon {
            out.push(path.clone());
            return;
        }
        let here = *path.last().unwrap_or(&st.pose);
        for a in s.legal_actions(&here) {
            path.push(s.apply(&here, a).unwrap());
            walk(s, st, path, out);
            path.pop();
        }
    }
    let first_pose = s.apply(&st.pose, first).unwrap();
    let mut seqs = Vec::new();
    walk(s, st, &mut vec![first_pose], &mut seqs);
    let map = map_estimate(&st.belief);
    let xi = threshold_from_pfa(&s.detector).unwrap();
    let h0 = s.cell_count() as f64 * std::f64::consts::LN_2;
    let mut best = f64::NEG_INFINITY;
    for seq in seqs {
        let mut belief = st.belief.clone();
        let mut total = 0.0;
        for (l, pose) in seq.iter().enumerate() {
            let scan = EnergyScan {
                energy: expected_energy(s, &map, pose).mean,
                pose: *pose,
                k: 0,
                clamped: 0,
            };
            belief = update(&belief, &scan, s, pose).unwrap();
            let r_map = h0 / map_entropy(&belief).max(s.planner.entropy_floor);
            let r_d: f64 = (0..s.cell_count())
                .map(|c| {
                    let lam =
                        crate::detector::noncentrality_on(&s.detector, &s.grid, &map, pose.cell, c);
                    st.target.mass[c] * pd_theoretical(&s.detector, xi, lam)
                })
                .sum();
            total += s.planner.discount.powi(l as i32)
                * (s.planner.w_detection * r_d + s.planner.w_map * r_map);
        }
        best = best.max(total);
    }
    best
}

#[test]
fn lookahead_matches_brute_force() {
    let mut s = toy(4, 4, &[(1, 2)], 5, 15);
    s.planner.horizon = 3;
    let mut st = AgentState::initial(&s);
    st.belief.log_odds[6] = 1.5;
    st.belief.log_odds[10] = 0.7;
    st.target = TargetBelief::uniform(16);
    for v in q_lookahead(&st, &s).unwrap() {
        let b = brute_force(&st, &s, v.action);
        assert!(
            (v.q - b).abs() <= 1e-12 * b.abs().max(1.0),
            "{:?}: {} vs {}",
            v.action,
            v.q,
            b
        );
    }
}

#[test]
fn equal_rewards_equal_values() {
    // detection only, with the target walled in: r_d = P_FA everywhere
    let mut s = toy(5, 5, &[(3, 3), (3, 4), (4, 3)], 12, 24);
    s.planner.w_map = 0.0;
    let mut st = AgentState::initial(&s);
    st.target = TargetBelief::point(25, 24);
    st.belief.log_odds[18] = 5.0;
    st.belief.log_odds[23] = 5.0;
    st.belief.log_odds[19] = 5.0;
    let values = q_lookahead(&st, &s).unwrap();
    assert_eq!(values.len(), 4);
    for v in &values {
        assert_eq!(v.q, values[0].q);
    }
    // ties go to North
    assert_eq!(greedy(&values), Some(Action::North));
}

#[test]
fn tie_breaks_by_enumeration_order() {
    let v = |action, q| ActionValue {
        action,
        q,
        r_detection: 0.0,
        r_map: 0.0,
    };
    assert_eq!(
        greedy(&[v(Action::North, 1.0), v(Action::East, 1.0)]),
        Some(Action::North)
    );
    assert_eq!(
        greedy(&[v(Action::East, 1.0), v(Action::South, 2.0)]),
        Some(Action::South)
    );
}

#[test]
fn greedy_selection_without_exploration() {
    let s = toy(4, 4, &[(2, 2)], 5, 15);
    let st = AgentState::initial(&s);
    let best = greedy(&q_lookahead(&st, &s).unwrap()).unwrap();
    for seed in 0..20 {
        let c = select_action_with(&st, &s, &mut SimRng::new(seed), 0.0).unwrap();
        assert_eq!(c.action, best);
        assert!(!c.explored);
    }
}

#[test]
fn full_exploration_is_uniform() {
    let mut s = toy(5, 5, &[], 12, 24);
    s.planner.horizon = 1;
    let st = AgentState::initial(&s);
    let mut rng = SimRng::new(8);
    let n = 10_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        let c = select_action_with(&st, &s, &mut rng, 1.0).unwrap();
        counts[c.action.code() as usize] += 1;
    }
    let p = 0.25;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - n as f64 * p).abs() < 3.0 * sd, "{counts:?}");
    }
}

#[test]
fn step_advances_time_and_pose() {
    let s = Scenario::reference(16);
    let st = AgentState::initial(&s);
    let next = step(&st, Action::East, &s, &mut SimRng::new(1)).unwrap();
    assert_eq!(next.k, 1);
    assert_eq!(next.pose.cell, st.pose.cell + 1);
    assert_eq!(next.belief.k, 1);
    let rec = next.last_detection.unwrap();
    assert_eq!(rec.k, 1);
    assert_eq!(rec.pose, next.pose);
    assert!(matches!(
        step(&next, Action::West, &s, &mut SimRng::new(1)).map(|s| s.pose.cell),
        Ok(c) if c == st.pose.cell
    ));

    // walking into a wall is an error
    let corner = s.relayout(3, 3, &[], 0, 8).unwrap();
    let st = AgentState::initial(&corner);
    assert!(matches!(
        step(&st, Action::South, &corner, &mut SimRng::new(1)),
        Err(Error::IllegalAction { .. })
    ));
}

#[test]
fn noise_free_step_is_the_deterministic_pipeline() {
    let s = Scenario::reference(100);
    let st = AgentState::initial(&s);
    let next = step_with(&st, Action::North, &s, &mut SimRng::new(3), ScanNoise::Off).unwrap();
    let pose = s.apply(&st.pose, Action::North).unwrap();
    let scan = EnergyScan {
        energy: expected_energy(&s, &s.occupied, &pose).mean,
        pose,
        k: 1,
        clamped: 0,
    };
    assert_eq!(next.belief, update(&st.belief, &scan, &s, &pose).unwrap());
}

#[test]
fn noise_free_steps_never_raise_entropy() {
    let s = Scenario::reference(16)
        .relayout(6, 6, &[(4, 3), (4, 1)], 0, 35)
        .unwrap();
    let mut st = AgentState::initial(&s);
    let path = [
        Action::North,
        Action::North,
        Action::East,
        Action::East,
        Action::North,
        Action::East,
    ];
    let mut rng = SimRng::new(2);
    for a in path {
        let before = map_entropy(&st.belief);
        st = step_with(&st, a, &s, &mut rng, ScanNoise::Off).unwrap();
        assert!(map_entropy(&st.belief) <= before);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Exact scaling by powers of two.
    #[test]
    fn argmax_is_scale_invariant(exp in -8i32..8, start in 0usize..16) {
        let mut s = toy(4, 4, &[(2, 1)], 0, 15);
        prop_assume!(s.is_free(start));
        s.uav_start = start;
        s.planner.horizon = 2;
        let st = AgentState::initial(&s);
        let base = greedy(&q_lookahead(&st, &s).unwrap());
        let c = 2f64.powi(exp);
        s.planner.w_detection *= c;
        s.planner.w_map *= c;
        prop_assert_eq!(greedy(&q_lookahead(&st, &s).unwrap()), base);
    }

    #[test]
    fn detection_only_moves_toward_target(start in 0usize..36, target in 0usize..36) {
        let mut s = Scenario::reference(16).relayout(6, 6, &[], 0, 0).unwrap();
        prop_assume!(start != target);
        s.detector.target_eirp_dbm = -70.0;
        s.planner.w_map = 0.0;
        s.planner.horizon = 1;
        let mut st = AgentState::initial(&s);
        st.pose = s.pose(start).unwrap();
        st.target = TargetBelief::point(36, target);
        let a = greedy(&q_lookahead(&st, &s).unwrap()).unwrap();
        let next = s.apply(&st.pose, a).unwrap();
        prop_assert!(s.distance(next.cell, target) < s.distance(start, target));
    }
}
