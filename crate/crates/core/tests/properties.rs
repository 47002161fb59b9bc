use esdrl::ddpg::{polyak, smooth_curve, Agent, DdpgConfig, ReplayBuffer, Transition};
use esdrl::es::{es_action, es_init, EsParams};
use esdrl::harness::{ExperimentConfig, ScenarioName};
use esdrl::sim::{
    compute_reward, goal_at, FrictionMap, GoalSpec, Scene, Task, ACTION_DIM, STATE_DIM, SUCCESS_BONUS,
    SUCCESS_TOLERANCE,
};
use esdrl::supervisor::{hybrid_action, update_beta, HybridState};
use esdrl::tensor::{norm_forward, NormLayer, LAYER_NORM_EPSILON};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-2.0..2.0f64)
}

fn action() -> impl Strategy<Value = [f64; ACTION_DIM]> {
    prop::array::uniform4(-1.5..1.5f64)
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn reward_is_negative_distances_plus_bonus(ee in point(), obj in point(), goal in point()) {
        let t = compute_reward(&ee, &obj, &goal);
        let d2 = dist(&obj, &goal);
        let bonus = if d2 <= SUCCESS_TOLERANCE { SUCCESS_BONUS } else { 0.0 };
        prop_assert!((t.reward - (-dist(&ee, &obj) - d2 + bonus)).abs() < 1e-12);
        prop_assert_eq!(t.success, d2 <= SUCCESS_TOLERANCE);
    }

    #[test]
    fn es_commands_stay_inside_their_amplitude(
        alpha in 0.01..5.0f64,
        k in 0.1..50.0f64,
        omega in 0.5..20.0f64,
        costs in prop::collection::vec(-10.0..10.0f64, 1..60),
        gripper in -1.0..1.0f64,
    ) {
        let p = EsParams::new(alpha, k, omega, vec![1.0, 1.75, 2.9], 0.1).unwrap();
        let mut s = es_init(&[0.0, 0.0, 0.0, gripper]).unwrap();
        for c in costs {
            let a = es_action(&p, &mut s, c).unwrap();
            for i in 0..3 {
                prop_assert!(a[i].abs() <= p.amplitude(i).min(1.0) + 1e-15);
            }
            prop_assert_eq!(a[3], gripper);
        }
    }

    #[test]
    fn beta_never_returns_to_one(contacts in prop::collection::vec(any::<bool>(), 1..100)) {
        let mut h = HybridState::new();
        let mut history = Vec::new();
        for (t, &c) in contacts.iter().enumerate() {
            update_beta(&mut h, c, t as u64, &[0.0; ACTION_DIM]).unwrap();
            history.push(h.beta);
        }
        prop_assert!(history.windows(2).all(|w| w[1] <= w[0]));
        let first = contacts.iter().position(|&c| c).map(|t| t as u64);
        prop_assert_eq!(h.t_c, first);
        prop_assert_eq!(h.es_state.is_some(), h.beta == 0);
    }

    #[test]
    fn hybrid_action_is_one_of_its_inputs(rl in action(), es in action(), beta in 0u8..=1) {
        let h = HybridState { beta, ..HybridState::new() };
        let a = hybrid_action(&h, &rl, &es);
        prop_assert!(a == rl || a == es);
        prop_assert_eq!(a == rl, beta == 1 || rl == es);
    }

    #[test]
    fn end_effector_stays_in_its_box(
        seed in 0u64..1000,
        actions in prop::collection::vec(action(), 1..40),
        pick in any::<bool>(),
    ) {
        let scene = Scene::nominal(if pick { Task::PickPlace } else { Task::Push }, 1.0);
        let (lo, hi) = scene.workspace.ee_bounds();
        let (mut s, _) = scene.reset(seed);
        for a in &actions {
            let (next, r) = scene.step(&s, a);
            for i in 0..3 {
                prop_assert!(next.ee_pos[i] >= lo[i] && next.ee_pos[i] <= hi[i]);
                prop_assert!((next.ee_pos[i] - s.ee_pos[i]).abs() <= scene.workspace.ee_step_scale + 1e-12);
            }
            prop_assert!(r.reward.is_finite());
            prop_assert!((0.0..=1.0).contains(&next.gripper_width));
            s = next;
        }
    }

    #[test]
    fn pushes_never_pull_the_puck(
        seed in 0u64..1000,
        actions in prop::collection::vec(action(), 1..40),
        mu in 0.5..2.0f64,
    ) {
        let scene = Scene { friction: FrictionMap::uniform(mu), ..Scene::nominal(Task::Push, mu) };
        let (mut s, _) = scene.reset(seed);
        for a in &actions {
            let (next, _) = scene.step(&s, a);
            let moved = [next.obj_pos[0] - s.obj_pos[0], next.obj_pos[1] - s.obj_pos[1]];
            let step = (moved[0].powi(2) + moved[1].powi(2)).sqrt();
            if step > 0.0 {
                // along the contact normal away from the end effector, or along its approach
                let back = [s.obj_pos[0] - next.ee_pos[0], s.obj_pos[1] - next.ee_pos[1]];
                let commanded = [next.ee_pos[0] - s.ee_pos[0], next.ee_pos[1] - s.ee_pos[1]];
                prop_assert!(moved[0] * back[0] + moved[1] * back[1] > -1e-12
                    || moved[0] * commanded[0] + moved[1] * commanded[1] > 0.0);
                let ws = &scene.workspace;
                prop_assert!(step <= ws.block_half_extent.max(ws.ee_step_scale * 3f64.sqrt()) + 1e-12);
                prop_assert_eq!(next.obj_pos[2], s.obj_pos[2]);
            }
            if s.off_table {
                prop_assert!(next.off_table);
                prop_assert_eq!(next.obj_pos, s.obj_pos);
            }
            s = next;
        }
    }

    #[test]
    fn reset_is_deterministic(seed in any::<u64>()) {
        let scene = Scene::nominal(Task::PickPlace, 1.0);
        prop_assert_eq!(scene.reset(seed), scene.reset(seed));
    }

    #[test]
    fn circular_goal_repeats_after_one_period(
        cx in 0.2..0.8f64, cy in 0.2..0.8f64, radius in 0.0..0.1f64,
        period in 1u32..1000, t in 0u64..10_000,
    ) {
        let g = GoalSpec::CircularPlanar { center: [cx, cy, 0.475], radius, period: period as f64 };
        let a = goal_at(&g, t);
        let b = goal_at(&g, t + period as u64);
        prop_assert!(dist(&a, &b) < 1e-9);
        prop_assert!((dist(&a, &[cx, cy, 0.475]) - radius).abs() < 1e-12);
    }

    #[test]
    fn friction_lookup_is_one_of_the_band_values(x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let map = FrictionMap::three_bands(1.0, 1.0);
        let mu = map.friction_at([x, y]);
        prop_assert!([0.8, 1.2, 1.5].contains(&mu));
        prop_assert!(mu <= map.max_mu());
    }

    #[test]
    fn replay_keeps_the_most_recent(capacity in 1usize..50, n in 0usize..200) {
        let mut buf = ReplayBuffer::new(capacity);
        for i in 0..n {
            buf.push(Transition {
                state: [0.0; STATE_DIM],
                action: [0.0; ACTION_DIM],
                reward: i as f64,
                next_state: [0.0; STATE_DIM],
                terminal: false,
            });
        }
        prop_assert_eq!(buf.len(), n.min(capacity));
        let kept: Vec<f64> = buf.iter_oldest_first().map(|t| t.reward).collect();
        let expected: Vec<f64> = (n.saturating_sub(capacity)..n).map(|i| i as f64).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn smoothing_a_constant_curve_returns_it(v in 0.0..1.0f64, n in 1usize..50, w in 0.0..0.99f64) {
        prop_assert!(smooth_curve(&vec![v; n], w).iter().all(|s| (s - v).abs() < 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn polyak_stays_between_source_and_target(a in 0u64..100, b in 0u64..100, tau in 0.0..1.0f64) {
        let cfg = DdpgConfig { hidden_dims: vec![4], ..DdpgConfig::default() };
        let src = Agent::new(cfg.clone(), a).unwrap().actor;
        let mut dst = Agent::new(cfg, b + 100).unwrap().actor;
        let before: Vec<f64> = dst.param_slices().into_iter().flatten().copied().collect();
        polyak(&mut dst, &src, tau);
        let after = dst.param_slices().into_iter().flatten().copied().collect::<Vec<_>>();
        let source = src.param_slices().into_iter().flatten().copied().collect::<Vec<_>>();
        for ((x, y), s) in after.iter().zip(before).zip(source) {
            let (lo, hi) = if y < s { (y, s) } else { (s, y) };
            prop_assert!(*x >= lo - 1e-15 && *x <= hi + 1e-15);
        }
    }
}

proptest! {
    #[test]
    fn layer_norm_output_has_zero_mean_and_unit_variance(
        x in prop::collection::vec(-100.0..100.0f64, 2..32),
        spread in 0.5..10.0f64,
    ) {
        let x: Vec<f64> = x.iter().enumerate().map(|(i, v)| v + spread * i as f64).collect();
        let y = norm_forward(&NormLayer::new(x.len()), &x).unwrap();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let raw_var = {
            let m = x.iter().sum::<f64>() / n;
            x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n
        };
        prop_assert!(mean.abs() < 1e-9);
        prop_assert!((var - raw_var / (raw_var + LAYER_NORM_EPSILON)).abs() < 1e-9);
    }

    #[test]
    fn layer_norm_ignores_shifts_of_its_input(
        x in prop::collection::vec(-10.0..10.0f64, 2..16),
        c in -50.0..50.0f64,
    ) {
        let layer = NormLayer::new(x.len());
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let a = norm_forward(&layer, &x).unwrap();
        let b = norm_forward(&layer, &shifted).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-6));
    }

    #[test]
    fn configs_survive_a_toml_round_trip(
        seed in any::<u32>(),
        gamma in 0.5..0.999f64,
        tau in 0.001..0.1f64,
        alpha in 0.1..3.0f64,
        episodes in 1usize..500,
        preset in 0usize..3,
    ) {
        let mut cfg = ScenarioName::ALL[preset].preset();
        cfg.seed = seed as u64;
        cfg.agent.gamma = gamma;
        cfg.agent.tau = tau;
        cfg.es.alpha = alpha;
        cfg.eval.episodes = episodes;
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}
