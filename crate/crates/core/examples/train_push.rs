//! Trains the desk-scale DDPG agent on the push task and writes the
//! checkpoint, learning curve and manifest to `runs/train_push`.
//!
//! cargo run --release --example train_push -- [epochs]

use std::path::Path;

use esdrl::harness::{cmd_train, ExperimentConfig};

fn main() {
    let mut cfg = ExperimentConfig::default();
    cfg.train.epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    cfg.train.stop_at_success = Some(0.8);
    let out = Path::new("runs/train_push");
    let run = cmd_train(&cfg, out, |r| {
        println!("epoch {:>3}  success {:.2}  smoothed {:.3}  return {:.2}", r.epoch + 1, r.success_rate, r.smoothed_success, r.mean_return);
    })
    .unwrap();
    println!("{} env steps, {} updates -> {}", run.report.env_steps, run.report.updates, run.checkpoint.display());
}
