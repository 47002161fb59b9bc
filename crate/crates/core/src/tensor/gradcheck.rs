//! Central finite-difference check of [`Mlp::backward`].

use super::{Mlp, Result};

/// Worst per-component disagreement between analytic and numeric gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradcheckReport {
    pub max_rel_error: f64,
    /// Components compared: every parameter plus every input entry.
    pub components: usize,
}

fn rel_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Compares the gradients of `L = upstream · net(input)` against central
/// differences of step `h`, for every parameter and input component.
/// Relative errors use `floor` as the smallest denominator.
pub fn gradcheck(net: &Mlp, input: &[f64], upstream: &[f64], h: f64, floor: f64) -> Result<GradcheckReport> {
    let (_, cache) = net.forward(input)?;
    let (grads, input_grad) = net.backward(&cache, upstream)?;
    let loss = |n: &Mlp, x: &[f64]| -> Result<f64> {
        Ok(n.predict(x)?.iter().zip(upstream).map(|(y, u)| y * u).sum())
    };

    let mut worst: f64 = 0.0;
    let mut components = 0;
    let mut probe = net.clone();
    for (t, analytic) in grads.tensors().iter().enumerate() {
        for (j, &g) in analytic.iter().enumerate() {
            let original = probe.param_slices()[t][j];
            probe.param_slices_mut()[t][j] = original + h;
            let up = loss(&probe, input)?;
            probe.param_slices_mut()[t][j] = original - h;
            let down = loss(&probe, input)?;
            probe.param_slices_mut()[t][j] = original;
            worst = worst.max(rel_error(g, (up - down) / (2.0 * h), floor));
            components += 1;
        }
    }
    let mut x = input.to_vec();
    for (j, &g) in input_grad.iter().enumerate() {
        let original = x[j];
        x[j] = original + h;
        let up = loss(net, &x)?;
        x[j] = original - h;
        let down = loss(net, &x)?;
        x[j] = original;
        worst = worst.max(rel_error(g, (up - down) / (2.0 * h), floor));
        components += 1;
    }
    Ok(GradcheckReport {
        max_rel_error: worst,
        components,
    })
}
