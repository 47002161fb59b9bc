use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::layer::{DenseLayer, NormLayer};
use super::{Result, TensorError};

/// Bound of the uniform initializer for the output layer.
const HEAD_INIT_BOUND: f64 = 3e-3;

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

fn fresh_tag() -> u64 {
    NEXT_TAG.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputHead {
    Tanh,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub output_head: OutputHead,
}

impl MlpSpec {
    /// Policy network: `state -> 256 -> 256 -> action`, tanh-bounded.
    pub fn actor(state_dim: usize, action_dim: usize) -> Self {
        Self {
            input_dim: state_dim,
            hidden_dims: vec![256, 256],
            output_dim: action_dim,
            output_head: OutputHead::Tanh,
        }
    }

    /// Value network: `[state, action] -> 256 -> 256 -> 1`, linear head.
    pub fn critic(state_dim: usize, action_dim: usize) -> Self {
        Self {
            input_dim: state_dim + action_dim,
            hidden_dims: vec![256, 256],
            output_dim: 1,
            output_head: OutputHead::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden_dims.iter().any(|&d| d == 0) {
            return Err(TensorError::InvalidSpec(format!(
                "all layer widths must be at least 1, got {self:?}"
            )));
        }
        Ok(())
    }

    fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut widths = Vec::with_capacity(self.hidden_dims.len() + 2);
        widths.push(self.input_dim);
        widths.extend_from_slice(&self.hidden_dims);
        widths.push(self.output_dim);
        widths.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Activations recorded by a forward pass, sufficient for exact backprop.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    tag: u64,
    /// Input to every dense layer, head included.
    inputs: Vec<Array2<f64>>,
    x_hat: Vec<Array2<f64>>,
    inv_std: Vec<Array1<f64>>,
    /// Normalized, affine-mapped values before the relu.
    pre_relu: Vec<Array2<f64>>,
    output: Array2<f64>,
}

impl ForwardCache {
    /// Values feeding each hidden relu, one matrix per hidden block.
    pub fn pre_activations(&self) -> &[Array2<f64>] {
        &self.pre_relu
    }

    pub fn output(&self) -> &Array2<f64> {
        &self.output
    }
}

/// Gradients in the same tensor order as [`Mlp::param_slices`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    tensors: Vec<Vec<f64>>,
}

impl GradientSet {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            tensors: net.param_slices().iter().map(|s| vec![0.0; s.len()]).collect(),
        }
    }

    pub fn tensors(&self) -> &[Vec<f64>] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.tensors
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.tensors.iter().flatten().copied()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

/// Multilayer perceptron with `dense -> layer norm -> relu` hidden blocks.
#[derive(Debug)]
pub struct Mlp {
    spec: MlpSpec,
    /// Hidden layers followed by the head.
    dense: Vec<DenseLayer>,
    norms: Vec<NormLayer>,
    tag: u64,
}

impl Clone for Mlp {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            dense: self.dense.clone(),
            norms: self.norms.clone(),
            tag: fresh_tag(),
        }
    }
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.dense == other.dense && self.norms == other.norms
    }
}

impl Mlp {
    /// All-zero weights, unit gains.
    pub fn zeros(spec: MlpSpec) -> Result<Self> {
        spec.validate()?;
        let dims = spec.layer_dims();
        let dense = dims.iter().map(|&(i, o)| DenseLayer::zeros(i, o)).collect();
        let norms = spec.hidden_dims.iter().map(|&w| NormLayer::new(w)).collect();
        Ok(Self {
            spec,
            dense,
            norms,
            tag: fresh_tag(),
        })
    }

    /// Hidden layers `U(±1/√fan_in)`, head `U(±3e-3)`.
    pub fn init<R: Rng + ?Sized>(spec: MlpSpec, rng: &mut R) -> Result<Self> {
        let mut net = Self::zeros(spec)?;
        let last = net.dense.len() - 1;
        for (idx, layer) in net.dense.iter_mut().enumerate() {
            let bound = if idx == last {
                HEAD_INIT_BOUND
            } else {
                1.0 / (layer.in_dim() as f64).sqrt()
            };
            *layer = DenseLayer::uniform(layer.in_dim(), layer.out_dim(), bound, rng);
        }
        Ok(net)
    }

    pub fn from_layers(spec: MlpSpec, dense: Vec<DenseLayer>, norms: Vec<NormLayer>) -> Result<Self> {
        spec.validate()?;
        let dims = spec.layer_dims();
        if dense.len() != dims.len() || norms.len() != spec.hidden_dims.len() {
            return Err(TensorError::InvalidSpec("layer count does not match spec".into()));
        }
        for (layer, &(i, o)) in dense.iter().zip(&dims) {
            if layer.in_dim() != i || layer.out_dim() != o || layer.biases.len() != o {
                return Err(TensorError::InvalidSpec(format!(
                    "dense layer is {}x{}, spec wants {o}x{i}",
                    layer.out_dim(),
                    layer.in_dim()
                )));
            }
        }
        for (norm, &w) in norms.iter().zip(&spec.hidden_dims) {
            if norm.width() != w || norm.shift.len() != w || !(norm.epsilon > 0.0) {
                return Err(TensorError::InvalidSpec("norm layer does not match hidden width".into()));
            }
        }
        let net = Self {
            spec,
            dense,
            norms,
            tag: fresh_tag(),
        };
        if !net.param_slices().iter().all(|s| s.iter().all(|v| v.is_finite())) {
            return Err(TensorError::NonFinite("network parameters".into()));
        }
        Ok(net)
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn dense_layers(&self) -> &[DenseLayer] {
        &self.dense
    }

    pub fn norm_layers(&self) -> &[NormLayer] {
        &self.norms
    }

    /// Tensor names matching [`Self::param_slices`].
    pub fn param_names(&self) -> Vec<String> {
        let hidden = self.norms.len();
        let mut names = Vec::new();
        for i in 0..hidden {
            names.push(format!("hidden.{i}.weight"));
            names.push(format!("hidden.{i}.bias"));
            names.push(format!("norm.{i}.gain"));
            names.push(format!("norm.{i}.shift"));
        }
        names.push("head.weight".into());
        names.push("head.bias".into());
        names
    }

    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        let mut shapes = Vec::new();
        for (d, n) in self.dense.iter().zip(&self.norms) {
            shapes.push(vec![d.out_dim(), d.in_dim()]);
            shapes.push(vec![d.out_dim()]);
            shapes.push(vec![n.width()]);
            shapes.push(vec![n.width()]);
        }
        let head = self.dense.last().expect("network has a head");
        shapes.push(vec![head.out_dim(), head.in_dim()]);
        shapes.push(vec![head.out_dim()]);
        shapes
    }

    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for (d, n) in self.dense.iter().zip(&self.norms) {
            out.push(d.weights.as_slice().expect("standard layout"));
            out.push(d.biases.as_slice().expect("standard layout"));
            out.push(n.gain.as_slice().expect("standard layout"));
            out.push(n.shift.as_slice().expect("standard layout"));
        }
        let head = self.dense.last().expect("network has a head");
        out.push(head.weights.as_slice().expect("standard layout"));
        out.push(head.biases.as_slice().expect("standard layout"));
        out
    }

    /// Mutable parameter access. Invalidates every outstanding cache.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.tag = fresh_tag();
        let hidden = self.norms.len();
        let (hidden_dense, head) = self.dense.split_at_mut(hidden);
        let mut out: Vec<&mut [f64]> = Vec::new();
        for (d, n) in hidden_dense.iter_mut().zip(self.norms.iter_mut()) {
            out.push(d.weights.as_slice_mut().expect("standard layout"));
            out.push(d.biases.as_slice_mut().expect("standard layout"));
            out.push(n.gain.as_slice_mut().expect("standard layout"));
            out.push(n.shift.as_slice_mut().expect("standard layout"));
        }
        out.push(head[0].weights.as_slice_mut().expect("standard layout"));
        out.push(head[0].biases.as_slice_mut().expect("standard layout"));
        out
    }

    pub fn param_count(&self) -> usize {
        self.param_slices().iter().map(|s| s.len()).sum()
    }

    /// Overwrites every parameter with the matching one from `other`.
    pub fn copy_from(&mut self, other: &Mlp) -> Result<()> {
        if self.spec != other.spec {
            return Err(TensorError::InvalidSpec("copy between different architectures".into()));
        }
        for (dst, src) in self.param_slices_mut().into_iter().zip(other.param_slices()) {
            dst.copy_from_slice(src);
        }
        Ok(())
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        if cols != self.spec.input_dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.spec.input_dim,
                got: cols,
            });
        }
        Ok(())
    }

    /// Batched forward pass returning the output and the backprop cache.
    pub fn forward_batch(&self, input: ArrayView2<'_, f64>) -> Result<(Array2<f64>, ForwardCache)> {
        self.check_input(input.ncols())?;
        let hidden = self.norms.len();
        let mut inputs = Vec::with_capacity(hidden + 1);
        let mut x_hats = Vec::with_capacity(hidden);
        let mut inv_stds = Vec::with_capacity(hidden);
        let mut pre_relu = Vec::with_capacity(hidden);
        let mut h = input.to_owned();
        for (dense, norm) in self.dense.iter().zip(&self.norms) {
            let z = dense.forward(h.view());
            let (y, x_hat, inv_std) = norm.forward_batch(&z);
            let next = y.mapv(|v| v.max(0.0));
            inputs.push(h);
            x_hats.push(x_hat);
            inv_stds.push(inv_std);
            pre_relu.push(y);
            h = next;
        }
        let mut out = self.dense[hidden].forward(h.view());
        inputs.push(h);
        if self.spec.output_head == OutputHead::Tanh {
            out.mapv_inplace(f64::tanh);
        }
        let cache = ForwardCache {
            tag: self.tag,
            inputs,
            x_hat: x_hats,
            inv_std: inv_stds,
            pre_relu,
            output: out.clone(),
        };
        Ok((out, cache))
    }

    /// Single-sample forward pass.
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        let x = ArrayView2::from_shape((1, input.len()), input).expect("row vector shape");
        let (out, cache) = self.forward_batch(x)?;
        Ok((out.into_raw_vec_and_offset().0, cache))
    }

    /// Forward pass without keeping activations.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.forward(input).map(|(out, _)| out)
    }

    pub fn predict_batch(&self, input: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.forward_batch(input).map(|(out, _)| out)
    }

    /// Reverse-mode pass. `upstream` is `∂L/∂output`, one row per sample.
    /// Returns parameter gradients summed over the batch and `∂L/∂input`.
    pub fn backward_batch(
        &self,
        cache: &ForwardCache,
        upstream: ArrayView2<'_, f64>,
    ) -> Result<(GradientSet, Array2<f64>)> {
        if cache.tag != self.tag {
            return Err(TensorError::StaleCache);
        }
        if upstream.dim() != cache.output.dim() {
            return Err(TensorError::DimensionMismatch {
                expected: cache.output.len(),
                got: upstream.len(),
            });
        }
        let hidden = self.norms.len();
        let mut grad = upstream.to_owned();
        if self.spec.output_head == OutputHead::Tanh {
            grad.zip_mut_with(&cache.output, |g, &y| *g *= 1.0 - y * y);
        }

        // Tensors are produced back to front and reversed at the end.
        let mut rev: Vec<Vec<f64>> = Vec::with_capacity(4 * hidden + 2);
        let head = &self.dense[hidden];
        rev.push(grad.sum_axis(Axis(0)).into_raw_vec_and_offset().0);
        rev.push(grad.t().dot(&cache.inputs[hidden]).into_raw_vec_and_offset().0);
        let mut dh = grad.dot(&head.weights);

        for layer in (0..hidden).rev() {
            let norm = &self.norms[layer];
            let x_hat = &cache.x_hat[layer];
            let mut dy = dh;
            dy.zip_mut_with(&cache.pre_relu[layer], |g, &y| {
                if y <= 0.0 {
                    *g = 0.0;
                }
            });
            let dshift = dy.sum_axis(Axis(0));
            let dgain = (&dy * x_hat).sum_axis(Axis(0));
            let mut dz = dy * &norm.gain;
            let width = dz.ncols() as f64;
            for ((mut row, xh), &inv) in dz
                .axis_iter_mut(Axis(0))
                .zip(x_hat.axis_iter(Axis(0)))
                .zip(cache.inv_std[layer].iter())
            {
                let mean_g = row.sum() / width;
                let mean_gx = row.iter().zip(xh.iter()).map(|(g, x)| g * x).sum::<f64>() / width;
                row.zip_mut_with(&xh, |g, &x| *g = inv * (*g - mean_g - x * mean_gx));
            }
            rev.push(dshift.into_raw_vec_and_offset().0);
            rev.push(dgain.into_raw_vec_and_offset().0);
            rev.push(dz.sum_axis(Axis(0)).into_raw_vec_and_offset().0);
            rev.push(dz.t().dot(&cache.inputs[layer]).into_raw_vec_and_offset().0);
            dh = dz.dot(&self.dense[layer].weights);
        }
        rev.reverse();
        Ok((GradientSet { tensors: rev }, dh))
    }

    /// Single-sample backward pass.
    pub fn backward(&self, cache: &ForwardCache, upstream: &[f64]) -> Result<(GradientSet, Vec<f64>)> {
        let g = ArrayView2::from_shape((1, upstream.len()), upstream).map_err(|_| TensorError::DimensionMismatch {
            expected: self.spec.output_dim,
            got: upstream.len(),
        })?;
        let (grads, dx) = self.backward_batch(cache, g)?;
        Ok((grads, dx.into_raw_vec_and_offset().0))
    }
}
