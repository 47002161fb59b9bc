//! ES alone pushing a puck from a pose just behind it. Prints the cost
//! averaged over each dither period, which should fall until the goal is
//! reached.
//!
//! cargo run --release --example es_push_descent -- [seed]

use esdrl::es::EsParams;
use esdrl::supervisor::{es_push_descent, DescentSetup};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let setup = DescentSetup::sample(seed, 6000);
    let run = es_push_descent(&setup, &EsParams::default()).unwrap();
    println!("seed {seed}: goal {:.3} m ahead, mu {:.2}, period {} steps", setup.distance, setup.mu, run.period);
    for (i, j) in run.window_means().iter().enumerate().step_by(5) {
        println!("  window {i:>3}  J {j:.4}");
    }
    match run.reached_at {
        Some(t) => println!("reached after {} steps; strictly decreasing: {}", t + 1, run.strictly_decreasing()),
        None => println!("not reached, final d2 {:.3}", run.final_d2),
    }
}
