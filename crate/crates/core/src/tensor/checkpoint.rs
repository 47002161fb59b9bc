//! Serializable mirrors of networks and optimizer state.
//!
//! Parameters are stored as a flat list of named, row-major tensors in the
//! order given by [`Mlp::param_names`]. `serde_json` writes the shortest
//! decimal string that parses back to the same `f64`, so a save/load cycle
//! is bit-exact.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, OptimizerState};
use super::layer::{DenseLayer, NormLayer};
use super::mlp::{Mlp, MlpSpec};
use super::{Result, TensorError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRecord {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpRecord {
    pub spec: MlpSpec,
    pub layer_norm_epsilon: f64,
    pub params: Vec<ParamRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerRecord {
    pub config: AdamConfig,
    pub step: u64,
    pub first_moment: Vec<ParamRecord>,
    pub second_moment: Vec<ParamRecord>,
}

fn records(names: &[String], shapes: &[Vec<usize>], data: &[&[f64]]) -> Vec<ParamRecord> {
    names
        .iter()
        .zip(shapes)
        .zip(data)
        .map(|((name, shape), d)| ParamRecord {
            name: name.clone(),
            shape: shape.clone(),
            data: d.to_vec(),
        })
        .collect()
}

fn checked<'a>(
    recs: &'a [ParamRecord],
    names: &[String],
    shapes: &[Vec<usize>],
) -> Result<Vec<&'a [f64]>> {
    if recs.len() != names.len() {
        return Err(TensorError::Checkpoint(format!(
            "expected {} tensors, found {}",
            names.len(),
            recs.len()
        )));
    }
    recs.iter()
        .zip(names.iter().zip(shapes))
        .map(|(rec, (name, shape))| {
            if &rec.name != name {
                return Err(TensorError::Checkpoint(format!(
                    "tensor `{}` found where `{name}` was expected",
                    rec.name
                )));
            }
            let len: usize = shape.iter().product();
            if &rec.shape != shape || rec.data.len() != len {
                return Err(TensorError::Checkpoint(format!(
                    "tensor `{name}` has shape {:?} with {} values, expected {shape:?}",
                    rec.shape,
                    rec.data.len()
                )));
            }
            Ok(rec.data.as_slice())
        })
        .collect()
}

impl From<&Mlp> for MlpRecord {
    fn from(net: &Mlp) -> Self {
        let epsilon = net
            .norm_layers()
            .first()
            .map_or(super::LAYER_NORM_EPSILON, |n| n.epsilon);
        Self {
            spec: net.spec().clone(),
            layer_norm_epsilon: epsilon,
            params: records(&net.param_names(), &net.param_shapes(), &net.param_slices()),
        }
    }
}

impl MlpRecord {
    pub fn to_mlp(&self) -> Result<Mlp> {
        let template = Mlp::zeros(self.spec.clone()).map_err(|e| TensorError::Checkpoint(e.to_string()))?;
        let data = checked(&self.params, &template.param_names(), &template.param_shapes())?;
        let hidden = self.spec.hidden_dims.len();
        let mut dense = Vec::with_capacity(hidden + 1);
        let mut norms = Vec::with_capacity(hidden);
        let tensor = |i: usize| data[i].to_vec();
        for (layer, t) in template.dense_layers().iter().zip(0..hidden) {
            let shape = (layer.out_dim(), layer.in_dim());
            dense.push(DenseLayer {
                weights: Array2::from_shape_vec(shape, tensor(4 * t)).expect("checked shape"),
                biases: Array1::from(tensor(4 * t + 1)),
            });
            norms.push(NormLayer {
                gain: Array1::from(tensor(4 * t + 2)),
                shift: Array1::from(tensor(4 * t + 3)),
                epsilon: self.layer_norm_epsilon,
            });
        }
        let head = &template.dense_layers()[hidden];
        dense.push(DenseLayer {
            weights: Array2::from_shape_vec((head.out_dim(), head.in_dim()), tensor(4 * hidden)).expect("checked shape"),
            biases: Array1::from(tensor(4 * hidden + 1)),
        });
        Mlp::from_layers(self.spec.clone(), dense, norms).map_err(|e| TensorError::Checkpoint(e.to_string()))
    }
}

impl OptimizerRecord {
    pub fn new(state: &OptimizerState, net: &Mlp) -> Self {
        let names = net.param_names();
        let shapes = net.param_shapes();
        let first: Vec<&[f64]> = state.first.iter().map(Vec::as_slice).collect();
        let second: Vec<&[f64]> = state.second.iter().map(Vec::as_slice).collect();
        Self {
            config: state.config,
            step: state.step,
            first_moment: records(&names, &shapes, &first),
            second_moment: records(&names, &shapes, &second),
        }
    }

    pub fn to_state(&self, net: &Mlp) -> Result<OptimizerState> {
        let names = net.param_names();
        let shapes = net.param_shapes();
        let first = checked(&self.first_moment, &names, &shapes)?;
        let second = checked(&self.second_moment, &names, &shapes)?;
        Ok(OptimizerState {
            config: self.config,
            first: first.into_iter().map(<[f64]>::to_vec).collect(),
            second: second.into_iter().map(<[f64]>::to_vec).collect(),
            step: self.step,
        })
    }
}
