use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Desired object position as a function of the step counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GoalSpec {
    Fixed {
        position: [f64; 3],
    },
    /// `center + radius·(sin(2πt/T), cos(2πt/T), 0)`.
    CircularPlanar {
        center: [f64; 3],
        radius: f64,
        period: f64,
    },
    /// Planar circle of period `period_xy` with a slow vertical sine of
    /// period `period_z` around `base_z`.
    Helix {
        center_x: f64,
        center_y: f64,
        radius: f64,
        period_xy: f64,
        base_z: f64,
        amplitude_z: f64,
        period_z: f64,
    },
}

impl GoalSpec {
    /// The 3-D tracking reference on a table of extents `x_max × y_max`.
    pub fn helix_for_table(x_max: f64, y_max: f64, table_height: f64) -> Self {
        GoalSpec::Helix {
            center_x: 0.75 * x_max,
            center_y: 0.75 * y_max,
            radius: 0.15,
            period_xy: 500.0,
            base_z: table_height,
            amplitude_z: 0.20,
            period_z: 4000.0,
        }
    }

    pub fn is_moving(&self) -> bool {
        !matches!(self, GoalSpec::Fixed { .. })
    }

    /// Shortest period over which the planar components repeat.
    pub fn planar_period(&self) -> Option<f64> {
        match *self {
            GoalSpec::Fixed { .. } => None,
            GoalSpec::CircularPlanar { period, .. } => Some(period),
            GoalSpec::Helix { period_xy, .. } => Some(period_xy),
        }
    }

    pub(crate) fn validate(&self, errors: &mut Vec<String>) {
        let positive = |name: &str, v: f64, errors: &mut Vec<String>| {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("goal.{name}: must be positive, got {v}"));
            }
        };
        match *self {
            GoalSpec::Fixed { position } => {
                if position.iter().any(|v| !v.is_finite()) {
                    errors.push("goal.position: must be finite".into());
                }
            }
            GoalSpec::CircularPlanar { radius, period, .. } => {
                positive("radius", radius, errors);
                positive("period", period, errors);
            }
            GoalSpec::Helix {
                radius,
                period_xy,
                period_z,
                amplitude_z,
                ..
            } => {
                positive("radius", radius, errors);
                positive("period_xy", period_xy, errors);
                positive("period_z", period_z, errors);
                if !(amplitude_z >= 0.0) {
                    errors.push(format!("goal.amplitude_z: must be non-negative, got {amplitude_z}"));
                }
            }
        }
    }
}

/// Goal position at step `t`.
pub fn goal_at(goal: &GoalSpec, t: u64) -> [f64; 3] {
    let t = t as f64;
    match *goal {
        GoalSpec::Fixed { position } => position,
        GoalSpec::CircularPlanar { center, radius, period } => {
            let phase = TAU * t / period;
            [center[0] + radius * phase.sin(), center[1] + radius * phase.cos(), center[2]]
        }
        GoalSpec::Helix {
            center_x,
            center_y,
            radius,
            period_xy,
            base_z,
            amplitude_z,
            period_z,
        } => {
            let planar = TAU * t / period_xy;
            let vertical = TAU * t / period_z;
            [
                center_x + radius * planar.sin(),
                center_y + radius * planar.cos(),
                base_z + amplitude_z * vertical.sin(),
            ]
        }
    }
}
