//! ES-only pushes that start in contact, for checking that the dither
//! descends the cost on average.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{es_cost, SupervisorError};
use crate::es::{es_action, es_init, period_means, EsParams};
use crate::sim::{
    FrictionMap, GoalSource, GoalSpec, ObjectPlacement, Scene, Task, WorkspaceSpec, ACTION_DIM, SUCCESS_TOLERANCE,
};

/// Seeded push setup: the end effector rests 1 mm behind the puck and the
/// goal lies straight ahead along +x.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentSetup {
    pub scene: Scene,
    pub ee_start: [f64; 3],
    pub distance: f64,
    pub mu: f64,
}

impl DescentSetup {
    /// Puck and goal centred on `(0.5 ± 0.05, 0.5 ± 0.05)`, `0.10..0.35` m
    /// apart, on uniform friction `μ ~ U(0.8, 1.5)`.
    pub fn sample(seed: u64, horizon: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ws = WorkspaceSpec {
            horizon,
            ..WorkspaceSpec::default()
        };
        let distance = rng.random_range(0.10..0.35);
        let c = [0.5 + rng.random_range(-0.05..0.05), 0.5 + rng.random_range(-0.05..0.05)];
        let mu = rng.random_range(0.8..1.5);
        let puck = [c[0] - 0.5 * distance, c[1]];
        let goal = [c[0] + 0.5 * distance, c[1], ws.rest_height()];
        let ee_start = [puck[0] - ws.block_half_extent - 0.001, puck[1], ws.rest_height()];
        let scene = Scene::new(
            Task::Push,
            ws,
            FrictionMap::uniform(mu),
            GoalSource::Given(GoalSpec::Fixed { position: goal }),
            ObjectPlacement::Fixed { position: puck },
        )
        .expect("descent setup lies on the default table");
        Self {
            scene,
            ee_start,
            distance,
            mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentRun {
    /// Cost seen before each step.
    pub costs: Vec<f64>,
    /// Step after which the puck first came within the success tolerance.
    pub reached_at: Option<usize>,
    /// Dither period used for window averaging, in steps.
    pub period: usize,
    pub final_d2: f64,
}

impl DescentRun {
    pub fn window_means(&self) -> Vec<f64> {
        period_means(&self.costs, self.period)
    }

    /// Every full-period mean strictly below the one before it.
    pub fn strictly_decreasing(&self) -> bool {
        self.window_means().windows(2).all(|w| w[1] < w[0])
    }
}

/// Runs ES from rest (zero warm start) until the puck reaches the goal or
/// the horizon runs out.
pub fn es_push_descent(setup: &DescentSetup, params: &EsParams) -> Result<DescentRun, SupervisorError> {
    let scene = &setup.scene;
    let (mut state, _) = scene.reset(0);
    state.ee_pos = setup.ee_start;
    let mut result = scene.evaluate(&state);
    let mut es = es_init(&[0.0; ACTION_DIM])?;
    let mut costs = Vec::new();
    let mut reached_at = None;
    for t in 0..scene.workspace.horizon {
        let cost = es_cost(&result);
        costs.push(cost);
        let a = es_action(params, &mut es, cost)?;
        (state, result) = scene.step(&state, &a);
        if result.d2 <= SUCCESS_TOLERANCE {
            reached_at = Some(t);
            break;
        }
    }
    Ok(DescentRun {
        costs,
        reached_at,
        period: params.dither_period_steps(),
        final_d2: result.d2,
    })
}
