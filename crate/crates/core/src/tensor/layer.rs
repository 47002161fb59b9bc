use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use super::{Result, TensorError};

/// Layer-normalization epsilon used by every hidden block.
pub const LAYER_NORM_EPSILON: f64 = 1e-5;

/// Fully connected layer computing `x · Wᵀ + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    /// `out × in`, row-major.
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            weights: Array2::zeros((out_dim, in_dim)),
            biases: Array1::zeros(out_dim),
        }
    }

    /// Weights and biases drawn from `U(-bound, bound)`.
    pub fn uniform<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, bound: f64, rng: &mut R) -> Self {
        let mut layer = Self::zeros(in_dim, out_dim);
        layer
            .weights
            .iter_mut()
            .chain(layer.biases.iter_mut())
            .for_each(|w| *w = rng.random_range(-bound..=bound));
        layer
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn forward(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut z = x.dot(&self.weights.t());
        z += &self.biases;
        z
    }
}

/// Per-sample normalization over the feature axis with a learned affine map.
#[derive(Debug, Clone, PartialEq)]
pub struct NormLayer {
    pub gain: Array1<f64>,
    pub shift: Array1<f64>,
    pub epsilon: f64,
}

impl NormLayer {
    pub fn new(width: usize) -> Self {
        Self {
            gain: Array1::ones(width),
            shift: Array1::zeros(width),
            epsilon: LAYER_NORM_EPSILON,
        }
    }

    pub fn width(&self) -> usize {
        self.gain.len()
    }

    /// Normalizes every row of `z`. Returns `(y, x_hat, inv_std)` where
    /// `y = gain ⊙ x_hat + shift`.
    pub(crate) fn forward_batch(&self, z: &Array2<f64>) -> (Array2<f64>, Array2<f64>, Array1<f64>) {
        let width = z.ncols() as f64;
        let mut x_hat = z.clone();
        let mut inv_std = Array1::zeros(z.nrows());
        for (mut row, inv) in x_hat.axis_iter_mut(Axis(0)).zip(inv_std.iter_mut()) {
            let mean = row.sum() / width;
            row.mapv_inplace(|v| v - mean);
            let var = row.iter().map(|v| v * v).sum::<f64>() / width;
            *inv = 1.0 / (var + self.epsilon).sqrt();
            let s = *inv;
            row.mapv_inplace(|v| v * s);
        }
        let mut y = &x_hat * &self.gain;
        y += &self.shift;
        (y, x_hat, inv_std)
    }
}

/// `gain ⊙ (x − mean(x)) / sqrt(var(x) + ε) + shift` for a single sample.
pub fn norm_forward(layer: &NormLayer, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != layer.width() {
        return Err(TensorError::DimensionMismatch {
            expected: layer.width(),
            got: x.len(),
        });
    }
    let z = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("row vector shape");
    let (y, _, _) = layer.forward_batch(&z);
    Ok(y.into_raw_vec_and_offset().0)
}
