//! Runs a built-in scenario with ES alone, which needs no trained actor,
//! and writes its logs to `runs/`.
//!
//! cargo run --release --example scenario_es_only -- [push_friction_fixed|push_friction_moving|pp_track3d]

use std::path::Path;

use esdrl::harness::{cmd_scenario, ScenarioName};
use esdrl::supervisor::Mode;

fn main() {
    let name: ScenarioName = std::env::args().nth(1).map_or(ScenarioName::PushFrictionFixed, |s| s.parse().unwrap());
    let mut cfg = name.preset();
    cfg.scenario.modes = vec![Mode::EsOnly];
    cfg.scenario.seeds = 5;
    let report = cmd_scenario(&cfg, None, None, Path::new("runs")).unwrap();
    for e in &report.episodes {
        println!("seed {:>2}  steps {:>4}  final d2 {:.3}  failure {:?}", e.seed, e.steps, e.final_d2, e.failure);
    }
}
