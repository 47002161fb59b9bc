//! Samples the moving goals used by the tracking scenarios.

use esdrl::harness::ScenarioName;
use esdrl::sim::{goal_at, GoalSource};

fn main() {
    for name in [ScenarioName::PushFrictionMoving, ScenarioName::PpTrack3d] {
        let cfg = name.preset();
        let GoalSource::Given(spec) = cfg.goal else { continue };
        println!("{name}:");
        for t in (0..=cfg.workspace.horizon as u64).step_by(cfg.workspace.horizon / 12) {
            let g = goal_at(&spec, t);
            println!("  t {t:>4}  ({:.3}, {:.3}, {:.3})", g[0], g[1], g[2]);
        }
    }
}
