//! A hand-built actor that drives straight into the puck; the supervisor
//! hands over to ES on first contact.

use esdrl::es::EsParams;
use esdrl::sim::{FrictionMap, GoalSource, GoalSpec, ObjectPlacement, Scene, Task, WorkspaceSpec, ACTION_DIM, STATE_DIM};
use esdrl::supervisor::{run_episode, Mode, RunOptions};
use esdrl::tensor::{Mlp, MlpSpec};

fn main() {
    let mut actor = Mlp::zeros(MlpSpec { hidden_dims: vec![8], ..MlpSpec::actor(STATE_DIM, ACTION_DIM) }).unwrap();
    let approach: [f64; ACTION_DIM] = [0.3, 0.0, -0.999, 0.6];
    for (b, a) in actor.param_slices_mut().last_mut().unwrap().iter_mut().zip(approach) {
        *b = a.atanh();
    }
    let ws = WorkspaceSpec::default();
    let scene = Scene::new(
        Task::Push,
        ws.clone(),
        FrictionMap::three_bands(ws.x_max, ws.y_max),
        GoalSource::Given(GoalSpec::Fixed { position: [0.9, 0.5, ws.rest_height()] }),
        ObjectPlacement::Fixed { position: [0.6, 0.5] },
    )
    .unwrap();
    let opts = RunOptions { horizon: 600, ..RunOptions::default() };
    for mode in Mode::ALL {
        let log = run_episode(&scene, 0, Some(&actor), &EsParams::default(), mode, &opts).unwrap();
        let s = &log.summary;
        println!(
            "{:<8} switch {:?}  steps {}  final d2 {:.3}  failure {:?}",
            mode.name(),
            s.switch_step,
            s.steps,
            s.final_d2,
            s.failure
        );
    }
}
