//! ES on `J(x) = |x|²` against its averaged gradient flow: the gap between
//! the two trajectories shrinks as the dither frequency grows.

use esdrl::es::averaging::QuadraticBenchmark;

fn main() {
    let bench = QuadraticBenchmark::default();
    println!("omega  gap      final |x|");
    for omega in [25.0, 50.0, 100.0, 200.0, 400.0] {
        let run = bench.run(omega).unwrap();
        let end = run.es.last().unwrap();
        let norm = end.iter().map(|v| v * v).sum::<f64>().sqrt();
        println!("{omega:<6} {:.5}  {norm:.4}", run.gap);
    }
}
