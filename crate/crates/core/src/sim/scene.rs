use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::friction::FrictionMap;
use super::goal::{goal_at, GoalSpec};
use super::reward::{compute_reward, distance};
use super::{Action, Environment, Observation, SimState, StepResult, Task, WorkspaceSpec, OBS_DIM};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid scene: {}", .0.join("; "))]
pub struct SceneError(pub Vec<String>);

/// Where the puck is placed at reset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectPlacement {
    /// Uniform over the axis-aligned box `[lo, hi]`.
    Region { lo: [f64; 2], hi: [f64; 2] },
    Fixed { position: [f64; 2] },
}

impl ObjectPlacement {
    /// Box of half-width `half_range` around `centre`.
    pub fn around(centre: [f64; 2], half_range: f64) -> Self {
        ObjectPlacement::Region {
            lo: [centre[0] - half_range, centre[1] - half_range],
            hi: [centre[0] + half_range, centre[1] + half_range],
        }
    }
}

impl Default for ObjectPlacement {
    fn default() -> Self {
        ObjectPlacement::around([0.5, 0.5], 0.15)
    }
}

/// Where the goal comes from at reset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GoalSource {
    /// Uniform over a box of half-width `range` around the initial puck,
    /// clipped to stay `block_half_extent` inside the table. For pick and
    /// place the goal is airborne with probability `airborne_probability`,
    /// at a height up to `max_lift` above the resting puck.
    Random {
        range: f64,
        airborne_probability: f64,
        max_lift: f64,
    },
    Given(GoalSpec),
}

impl GoalSource {
    pub fn random_default() -> Self {
        GoalSource::Random {
            range: 0.15,
            airborne_probability: 0.5,
            max_lift: 0.45,
        }
    }
}

/// Immutable description of an environment; every episode is a pure
/// function of the scene, the reset seed and the action sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub task: Task,
    pub workspace: WorkspaceSpec,
    pub friction: FrictionMap,
    pub goal: GoalSource,
    pub object: ObjectPlacement,
}

fn clamp3(p: [f64; 3], lo: [f64; 3], hi: [f64; 3]) -> [f64; 3] {
    [p[0].clamp(lo[0], hi[0]), p[1].clamp(lo[1], hi[1]), p[2].clamp(lo[2], hi[2])]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Projects a state onto the 25-slot observation and the current goal.
pub fn observe(state: &SimState) -> (Observation, [f64; 3]) {
    let mut o = [0.0; OBS_DIM];
    let rel = sub3(state.obj_pos, state.ee_pos);
    o[0..3].copy_from_slice(&state.ee_pos);
    o[3..6].copy_from_slice(&state.obj_pos);
    o[6..9].copy_from_slice(&rel);
    o[9] = 0.5 * state.gripper_width;
    o[10] = 0.5 * state.gripper_width;
    o[11] = state.obj_yaw;
    o[14..17].copy_from_slice(&state.obj_vel);
    o[19] = state.obj_yaw_rate;
    o[20..23].copy_from_slice(&state.ee_vel);
    o[23] = 0.5 * state.gripper_vel;
    o[24] = 0.5 * state.gripper_vel;
    (o, goal_at(&state.goal, state.t))
}

impl Scene {
    pub fn new(
        task: Task,
        workspace: WorkspaceSpec,
        friction: FrictionMap,
        goal: GoalSource,
        object: ObjectPlacement,
    ) -> Result<Self, SceneError> {
        let scene = Self {
            task,
            workspace,
            friction,
            goal,
            object,
        };
        let errors = scene.validation_errors();
        if errors.is_empty() {
            Ok(scene)
        } else {
            Err(SceneError(errors))
        }
    }

    /// Training scene: uniform friction, random object and goal.
    pub fn nominal(task: Task, mu: f64) -> Self {
        Self {
            task,
            workspace: WorkspaceSpec::default(),
            friction: FrictionMap::uniform(mu),
            goal: GoalSource::random_default(),
            object: ObjectPlacement::default(),
        }
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let ws = &self.workspace;
        let mut errors = Vec::new();
        ws.validate(&mut errors);
        self.friction.validate(ws.x_max, ws.y_max, &mut errors);
        match self.object {
            ObjectPlacement::Region { lo, hi } => {
                if !(lo[0] <= hi[0] && lo[1] <= hi[1]) {
                    errors.push(format!("object: region lower corner {lo:?} exceeds upper corner {hi:?}"));
                }
                if !ws.on_table(lo) || !ws.on_table(hi) {
                    errors.push(format!("object: region {lo:?}..{hi:?} is not on the table"));
                }
            }
            ObjectPlacement::Fixed { position } => {
                if !ws.on_table(position) {
                    errors.push(format!("object.position: {position:?} is off the table"));
                }
            }
        }
        match self.goal {
            GoalSource::Random {
                range,
                airborne_probability,
                max_lift,
            } => {
                if !(range >= 0.0 && range.is_finite()) {
                    errors.push(format!("goal.range: must be non-negative, got {range}"));
                }
                if !(0.0..=1.0).contains(&airborne_probability) {
                    errors.push("goal.airborne_probability: must lie in [0, 1]".into());
                }
                if !(max_lift >= 0.0 && ws.rest_height() + max_lift <= ws.table_height + ws.ee_max_height) {
                    errors.push("goal.max_lift: goal would be out of end-effector reach".into());
                }
            }
            GoalSource::Given(spec) => {
                let before = errors.len();
                spec.validate(&mut errors);
                if errors.len() == before {
                    // Vertical excursions below the table are allowed: the
                    // helix reference dips under the surface for part of its
                    // slow period and stays unreachable there.
                    let (_, hi) = ws.ee_bounds();
                    let exits = (0..=ws.horizon as u64).find(|&t| {
                        let g = goal_at(&spec, t);
                        !ws.on_table([g[0], g[1]]) || g[2] > hi[2]
                    });
                    if let Some(t) = exits {
                        errors.push(format!("goal: trajectory leaves the workspace at step {t}"));
                    }
                }
            }
        }
        errors
    }

    fn sample_goal(&self, rng: &mut ChaCha8Rng, obj: [f64; 2]) -> GoalSpec {
        match self.goal {
            GoalSource::Given(spec) => spec,
            GoalSource::Random {
                range,
                airborne_probability,
                max_lift,
            } => {
                let ws = &self.workspace;
                let m = ws.block_half_extent;
                let gx = (obj[0] + rng.random_range(-range..=range)).clamp(m, ws.x_max - m);
                let gy = (obj[1] + rng.random_range(-range..=range)).clamp(m, ws.y_max - m);
                let mut gz = ws.rest_height();
                if self.task == Task::PickPlace && rng.random_bool(airborne_probability) {
                    gz += rng.random_range(0.0..=max_lift);
                }
                GoalSpec::Fixed { position: [gx, gy, gz] }
            }
        }
    }

    /// Initial state for `seed`. The end effector starts above the table
    /// centre; the push gripper is closed, the pick-and-place gripper open.
    pub fn reset(&self, seed: u64) -> (SimState, StepResult) {
        let ws = &self.workspace;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [ox, oy] = match self.object {
            ObjectPlacement::Fixed { position } => position,
            ObjectPlacement::Region { lo, hi } => [rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1])],
        };
        let goal = self.sample_goal(&mut rng, [ox, oy]);
        let state = SimState {
            ee_pos: ws.home(),
            ee_vel: [0.0; 3],
            gripper_width: if self.task == Task::Push { 0.0 } else { 1.0 },
            gripper_vel: 0.0,
            obj_pos: [ox, oy, ws.rest_height()],
            obj_vel: [0.0; 3],
            obj_yaw: 0.0,
            obj_yaw_rate: 0.0,
            grasped: false,
            off_table: false,
            t: 0,
            goal,
        };
        let result = self.evaluate(&state);
        (state, result)
    }

    /// Contact flag driving the supervisor: touching the puck side for
    /// push, holding it for pick and place.
    pub fn contact(&self, state: &SimState) -> bool {
        match self.task {
            Task::PickPlace => state.grasped,
            Task::Push => {
                if state.off_table {
                    return false;
                }
                let ws = &self.workspace;
                let dx = state.ee_pos[0] - state.obj_pos[0];
                let dy = state.ee_pos[1] - state.obj_pos[1];
                let gap = (dx * dx + dy * dy).sqrt() - ws.block_half_extent;
                // bottom face inclusive up to rounding (an end effector
                // resting on the table sits exactly there), top exclusive
                let dz = state.ee_pos[2] - state.obj_pos[2];
                let in_band = -ws.block_half_extent - 1e-9 <= dz && dz < ws.block_half_extent;
                gap <= ws.contact_tol && in_band
            }
        }
    }

    /// Observation, reward terms and flags for an arbitrary state.
    pub fn evaluate(&self, state: &SimState) -> StepResult {
        let (observation, goal) = observe(state);
        let terms = compute_reward(&state.ee_pos, &state.obj_pos, &goal);
        StepResult {
            observation,
            goal,
            reward: terms.reward,
            success: terms.success,
            contact: self.contact(state),
            d1: terms.d1,
            d2: terms.d2,
            object_off_table: state.off_table,
        }
    }

    /// Advances one step. Action components are clamped to `[-1, 1]`;
    /// non-finite components are treated as zero.
    pub fn step(&self, state: &SimState, action: &Action) -> (SimState, StepResult) {
        let ws = &self.workspace;
        let a = action.map(|v| if v.is_finite() { v.clamp(-1.0, 1.0) } else { 0.0 });
        let (lo, hi) = ws.ee_bounds();
        let mut next = state.clone();
        next.t = state.t + 1;

        let commanded = [
            state.ee_pos[0] + ws.ee_step_scale * a[0],
            state.ee_pos[1] + ws.ee_step_scale * a[1],
            state.ee_pos[2] + ws.ee_step_scale * a[2],
        ];
        let mut ee = clamp3(commanded, lo, hi);
        let mut obj = state.obj_pos;

        match self.task {
            Task::Push => {
                if !state.off_table {
                    self.resolve_push(state, &mut ee, &mut obj);
                }
            }
            Task::PickPlace => {
                let width = (state.gripper_width + ws.gripper_rate * a[3]).clamp(0.0, 1.0);
                next.gripper_width = width;
                if state.grasped {
                    if a[3] > 0.0 {
                        next.grasped = false;
                        obj[2] = ws.rest_height();
                    } else {
                        obj = ee;
                    }
                } else if a[3] < 0.0 && !state.off_table && distance(&ee, &obj) <= ws.grasp_radius {
                    next.grasped = true;
                    obj = ee;
                }
            }
        }

        if !state.off_table && !ws.on_table([obj[0], obj[1]]) {
            next.off_table = true;
        }
        next.ee_vel = sub3(ee, state.ee_pos);
        next.obj_vel = sub3(obj, state.obj_pos);
        next.gripper_vel = next.gripper_width - state.gripper_width;
        next.ee_pos = ee;
        next.obj_pos = obj;
        let result = self.evaluate(&next);
        (next, result)
    }

    /// Quasi-static pusher/puck interaction; mutates the proposed end
    /// effector position and the puck position in place.
    ///
    /// The end effector is position controlled through a compliant contact:
    /// it may sink into the puck by up to `μ·d_stick`, and only the
    /// penetration beyond that moves the puck.
    fn resolve_push(&self, state: &SimState, ee: &mut [f64; 3], obj: &mut [f64; 3]) {
        let ws = &self.workspace;
        let radius = ws.block_half_extent;
        let top = obj[2] + ws.block_half_extent;
        let dx = obj[0] - ee[0];
        let dy = obj[1] - ee[1];
        let dist = (dx * dx + dy * dy).sqrt();
        if dist >= radius || ee[2] >= top {
            return;
        }
        if state.ee_pos[2] >= top {
            // came down onto the top face
            ee[2] = top;
            return;
        }
        let px = obj[0] - state.ee_pos[0];
        let py = obj[1] - state.ee_pos[1];
        let crossed = px * dx + py * dy <= 0.0 || dist <= 1e-12;
        let (normal, penetration) = if !crossed {
            ([dx / dist, dy / dist], radius - dist)
        } else {
            // the step jumped past the centre; push along the approach
            let mx = ee[0] - state.ee_pos[0];
            let my = ee[1] - state.ee_pos[1];
            let m = (mx * mx + my * my).sqrt();
            let n = if m > 1e-12 { [mx / m, my / m] } else { [1.0, 0.0] };
            let along = px * n[0] + py * n[1];
            let off2 = (px * px + py * py - along * along).max(0.0);
            let entry = along - (radius * radius - off2).max(0.0).sqrt();
            (n, (m - entry).max(0.0))
        };
        let mu = self.friction.friction_at([obj[0], obj[1]]);
        let travel = (penetration - mu * ws.stiction_scale).max(0.0);
        obj[0] += travel * normal[0];
        obj[1] += travel * normal[1];
    }
}

/// A scene together with its running state.
#[derive(Debug, Clone)]
pub struct Episode {
    pub scene: Scene,
    state: SimState,
}

impl Episode {
    pub fn new(scene: Scene) -> Self {
        let (state, _) = scene.reset(0);
        Self { scene, state }
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn contact(&self) -> bool {
        self.scene.contact(&self.state)
    }
}

impl Environment for Episode {
    fn reset(&mut self, seed: u64) -> StepResult {
        let (state, result) = self.scene.reset(seed);
        self.state = state;
        result
    }

    fn step(&mut self, action: &Action) -> StepResult {
        let (state, result) = self.scene.step(&self.state, action);
        self.state = state;
        result
    }

    fn horizon(&self) -> usize {
        self.scene.workspace.horizon
    }
}
