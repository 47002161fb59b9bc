//! Central-difference check of the analytic backward pass on random actor
//! and critic shaped networks.

use esdrl::tensor::{gradcheck, Mlp, MlpSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (name, spec) in [
        ("actor", MlpSpec { hidden_dims: vec![16, 16], ..MlpSpec::actor(28, 4) }),
        ("critic", MlpSpec { hidden_dims: vec![16, 16], ..MlpSpec::critic(28, 4) }),
    ] {
        let net = Mlp::init(spec, &mut rng).unwrap();
        let x: Vec<f64> = (0..net.spec().input_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u: Vec<f64> = (0..net.spec().output_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = gradcheck(&net, &x, &u, 1e-5, 1e-8).unwrap();
        println!("{name}: {} parameters, max relative error {:.2e}", net.param_count(), r.max_rel_error);
    }
}
