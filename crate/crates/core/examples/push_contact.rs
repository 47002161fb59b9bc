//! Scripted straight pushes on the three friction bands: the same stroke
//! moves the puck less where friction is higher.

use esdrl::sim::{FrictionMap, GoalSource, GoalSpec, ObjectPlacement, Scene, Task, WorkspaceSpec};

fn main() {
    let ws = WorkspaceSpec::default();
    for mu in [0.8, 1.2, 1.5] {
        let scene = Scene::new(
            Task::Push,
            ws.clone(),
            FrictionMap::uniform(mu),
            GoalSource::Given(GoalSpec::Fixed { position: [0.9, 0.5, ws.rest_height()] }),
            ObjectPlacement::Fixed { position: [0.5, 0.5] },
        )
        .unwrap();
        let (mut s, _) = scene.reset(0);
        s.ee_pos = [0.5 - ws.block_half_extent - 0.01, 0.5, ws.rest_height()];
        let mut contacts = 0;
        for _ in 0..10 {
            let (next, r) = scene.step(&s, &[0.5, 0.0, 0.0, 0.0]);
            contacts += r.contact as usize;
            s = next;
        }
        println!("mu {mu}: puck moved {:.4} m, {contacts} contact steps", s.obj_pos[0] - 0.5);
    }
}
