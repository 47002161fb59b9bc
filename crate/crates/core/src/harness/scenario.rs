//! The three built-in evaluation scenarios.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ScenarioConfig};
use crate::es::EsParams;
use crate::sim::{FrictionMap, GoalSource, GoalSpec, ObjectPlacement, Task, WorkspaceSpec};
use crate::supervisor::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    /// Push across three friction bands to a fixed far goal.
    PushFrictionFixed,
    /// Push onto a small circling goal near the high-friction corner.
    PushFrictionMoving,
    /// Carry the grasped object along a 3-D helix.
    PpTrack3d,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 3] = [
        ScenarioName::PushFrictionFixed,
        ScenarioName::PushFrictionMoving,
        ScenarioName::PpTrack3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioName::PushFrictionFixed => "push_friction_fixed",
            ScenarioName::PushFrictionMoving => "push_friction_moving",
            ScenarioName::PpTrack3d => "pp_track3d",
        }
    }

    pub fn task(self) -> Task {
        match self {
            ScenarioName::PpTrack3d => Task::PickPlace,
            _ => Task::Push,
        }
    }

    /// Complete configuration of the scenario on the default table.
    pub fn preset(self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        let mut ws = WorkspaceSpec::default();
        let rest = ws.rest_height();
        let scenario = ScenarioConfig {
            name: self.name().into(),
            seeds: 20,
            modes: Mode::ALL.to_vec(),
            ..ScenarioConfig::default()
        };
        match self {
            ScenarioName::PushFrictionFixed => {
                ws.horizon = 3000;
                ExperimentConfig {
                    task: Task::Push,
                    friction: FrictionMap::three_bands(ws.x_max, ws.y_max),
                    goal: GoalSource::Given(GoalSpec::Fixed {
                        position: [0.8 * ws.x_max, 0.5 * ws.y_max, rest],
                    }),
                    object: ObjectPlacement::around([0.2 * ws.x_max, 0.5 * ws.y_max], 0.03),
                    workspace: ws,
                    scenario,
                    ..base
                }
            }
            ScenarioName::PushFrictionMoving => {
                ws.horizon = 3000;
                ExperimentConfig {
                    task: Task::Push,
                    friction: FrictionMap::three_bands(ws.x_max, ws.y_max),
                    goal: GoalSource::Given(GoalSpec::CircularPlanar {
                        center: [0.9 * ws.x_max, 0.9 * ws.y_max, rest],
                        radius: 0.05,
                        period: 200.0,
                    }),
                    object: ObjectPlacement::around([0.7 * ws.x_max, 0.7 * ws.y_max], 0.03),
                    workspace: ws,
                    scenario,
                    ..base
                }
            }
            ScenarioName::PpTrack3d => {
                ws.horizon = 4000;
                ExperimentConfig {
                    task: Task::PickPlace,
                    friction: FrictionMap::uniform(1.0),
                    goal: GoalSource::Given(GoalSpec::helix_for_table(ws.x_max, ws.y_max, ws.table_height)),
                    object: ObjectPlacement::around([0.6 * ws.x_max, 0.75 * ws.y_max], 0.03),
                    workspace: ws,
                    es: EsParams {
                        alpha: 3.0,
                        k: 30.0,
                        ..EsParams::default()
                    },
                    scenario,
                    ..base
                }
            }
        }
    }
}

impl std::fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScenarioName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioName::ALL.into_iter().find(|n| n.name() == s).ok_or_else(|| {
            let names: Vec<_> = ScenarioName::ALL.iter().map(|n| n.name()).collect();
            format!("unknown scenario {s:?}; expected one of {}", names.join(", "))
        })
    }
}
