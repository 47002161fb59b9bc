//! Saves a fresh agent, reloads it and prints what inspection reports.

use esdrl::ddpg::{Agent, DdpgConfig};
use esdrl::harness::{cmd_inspect_checkpoint, load_agent, save_agent};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("checkpoint.json");
    let agent = Agent::new(DdpgConfig::default(), 42).unwrap();
    save_agent(&path, &agent).unwrap();
    let back = load_agent(&path).unwrap();
    let same = back.actor.param_slices() == agent.actor.param_slices();
    let summary = cmd_inspect_checkpoint(&path).unwrap();
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    println!("actor parameters identical after reload: {same}");
}
