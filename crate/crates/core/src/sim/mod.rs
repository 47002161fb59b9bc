//! Deterministic desk-scale manipulation simulator.
//!
//! The end effector is kinematic: each step moves it by `ee_step_scale`
//! metres per unit of action along each Cartesian axis. The object is a
//! round puck of radius `block_half_extent` resting on the table:
//!
//! * **push**: the end effector is held by a compliant position
//!   controller. It may sink into the puck side by up to `μ·d_stick`, where
//!   `μ` is the friction under the puck; deeper commanded penetration slides
//!   the puck along the contact normal by `max(0, d_cmd − μ·d_stick)`. The
//!   gripper stays closed.
//! * **pick and place**: the fingers straddle the puck, so there are no
//!   push contacts. Closing the gripper within `grasp_radius` of the puck
//!   attaches it rigidly; opening releases it back onto the table.
//!
//! A puck whose centre leaves the table is marked off-table and stops
//! interacting with anything.
//!
//! # Observation layout
//!
//! | slots  | content                                   |
//! |--------|-------------------------------------------|
//! | 0..3   | end-effector position                     |
//! | 3..6   | object position                           |
//! | 6..9   | object − end effector                     |
//! | 9..11  | finger positions (`width / 2` each)       |
//! | 11..14 | object orientation `(yaw, 0, 0)`          |
//! | 14..17 | object linear velocity (m/step)           |
//! | 17..20 | object angular velocity `(0, 0, yaw_rate)`|
//! | 20..23 | end-effector linear velocity (m/step)     |
//! | 23..25 | finger velocities                         |

mod friction;
mod goal;
mod reward;
mod scene;

pub use friction::{FrictionMap, FrictionPatch};
pub use goal::{goal_at, GoalSpec};
pub use reward::{compute_reward, RewardTerms, SUCCESS_BONUS, SUCCESS_TOLERANCE};
pub use scene::{observe, Episode, GoalSource, ObjectPlacement, Scene};

use serde::{Deserialize, Serialize};

pub const OBS_DIM: usize = 25;
pub const GOAL_DIM: usize = 3;
pub const STATE_DIM: usize = OBS_DIM + GOAL_DIM;
pub const ACTION_DIM: usize = 4;

pub type Action = [f64; ACTION_DIM];
pub type Observation = [f64; OBS_DIM];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Push,
    PickPlace,
}

/// Table geometry and end-effector kinematics. Lengths in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkspaceSpec {
    pub x_max: f64,
    pub y_max: f64,
    pub table_height: f64,
    pub block_half_extent: f64,
    pub ee_step_scale: f64,
    pub horizon: usize,
    pub contact_tol: f64,
    pub grasp_radius: f64,
    /// Stiction length scale `d_stick`; the dead zone is `μ·d_stick`.
    pub stiction_scale: f64,
    /// Highest end-effector position above the table.
    pub ee_max_height: f64,
    /// End-effector height above the table at reset.
    pub home_height: f64,
    /// Change of gripper width per unit of gripper command.
    pub gripper_rate: f64,
}

impl Default for WorkspaceSpec {
    fn default() -> Self {
        Self {
            x_max: 1.0,
            y_max: 1.0,
            table_height: 0.45,
            block_half_extent: 0.025,
            ee_step_scale: 0.03,
            horizon: 50,
            contact_tol: 0.01,
            grasp_radius: 0.03,
            stiction_scale: 0.004,
            ee_max_height: 0.5,
            home_height: 0.1,
            gripper_rate: 0.25,
        }
    }
}

impl WorkspaceSpec {
    /// Height of the puck centre when it rests on the table.
    pub fn rest_height(&self) -> f64 {
        self.table_height + self.block_half_extent
    }

    pub fn home(&self) -> [f64; 3] {
        [0.5 * self.x_max, 0.5 * self.y_max, self.table_height + self.home_height]
    }

    /// End-effector bounding box `(lower, upper)`.
    pub fn ee_bounds(&self) -> ([f64; 3], [f64; 3]) {
        (
            [0.0, 0.0, self.table_height],
            [self.x_max, self.y_max, self.table_height + self.ee_max_height],
        )
    }

    pub fn on_table(&self, p: [f64; 2]) -> bool {
        (0.0..=self.x_max).contains(&p[0]) && (0.0..=self.y_max).contains(&p[1])
    }

    pub(crate) fn validate(&self, errors: &mut Vec<String>) {
        let fields = [
            ("x_max", self.x_max),
            ("y_max", self.y_max),
            ("table_height", self.table_height),
            ("block_half_extent", self.block_half_extent),
            ("ee_step_scale", self.ee_step_scale),
            ("contact_tol", self.contact_tol),
            ("grasp_radius", self.grasp_radius),
            ("stiction_scale", self.stiction_scale),
            ("ee_max_height", self.ee_max_height),
            ("home_height", self.home_height),
            ("gripper_rate", self.gripper_rate),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("workspace.{name}: must be positive, got {v}"));
            }
        }
        if self.horizon == 0 {
            errors.push("workspace.horizon: must be positive".into());
        }
        if 2.0 * self.block_half_extent >= self.x_max.min(self.y_max) {
            errors.push("workspace.block_half_extent: block does not fit on the table".into());
        }
        if self.home_height > self.ee_max_height {
            errors.push("workspace.home_height: above ee_max_height".into());
        }
    }
}

/// Full simulator state. Positions in metres, velocities per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub ee_pos: [f64; 3],
    pub ee_vel: [f64; 3],
    pub gripper_width: f64,
    pub gripper_vel: f64,
    pub obj_pos: [f64; 3],
    pub obj_vel: [f64; 3],
    pub obj_yaw: f64,
    pub obj_yaw_rate: f64,
    pub grasped: bool,
    pub off_table: bool,
    pub t: u64,
    /// The goal realized for this episode.
    pub goal: GoalSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub goal: [f64; 3],
    pub reward: f64,
    pub success: bool,
    pub contact: bool,
    pub d1: f64,
    pub d2: f64,
    pub object_off_table: bool,
}

impl StepResult {
    /// Observation followed by the goal: the agent's 28-dimensional input.
    pub fn agent_state(&self) -> [f64; STATE_DIM] {
        let mut s = [0.0; STATE_DIM];
        s[..OBS_DIM].copy_from_slice(&self.observation);
        s[OBS_DIM..].copy_from_slice(&self.goal);
        s
    }
}

/// Anything the training loop can roll out episodes in.
pub trait Environment {
    fn reset(&mut self, seed: u64) -> StepResult;
    fn step(&mut self, action: &Action) -> StepResult;
    fn horizon(&self) -> usize;
}
