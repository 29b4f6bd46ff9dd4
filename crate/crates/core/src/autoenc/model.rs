use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::windows::SpectralWindowSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AeConfig {
    pub hidden_dim: usize,
    pub latent_dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Weight of the time-invariance term.
    pub invariance_weight: f64,
    pub seed: u64,
}

impl Default for AeConfig {
    fn default() -> Self {
        Self { hidden_dim: 16, latent_dim: 4, learning_rate: 0.01, epochs: 500, invariance_weight: 0.1, seed: 0 }
    }
}

impl AeConfig {
    pub fn validate(&self, input_dim: usize) -> Result<()> {
        if self.hidden_dim == 0 || self.latent_dim == 0 || self.epochs == 0 {
            return Err(Error::InvalidConfig("hidden_dim, latent_dim and epochs must be positive".into()));
        }
        if self.latent_dim >= input_dim {
            return Err(Error::InvalidConfig(format!(
                "latent_dim {} must be smaller than the feature length {input_dim}",
                self.latent_dim
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be finite and >= 0".into()));
        }
        if !(self.invariance_weight.is_finite() && self.invariance_weight >= 0.0) {
            return Err(Error::InvalidConfig("invariance_weight must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Dense layer view into the flat parameter vector: `out x in` weights
/// (row-major) followed by `out` biases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub(crate) struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    pub offset: usize,
}

impl Layer {
    fn weight_len(&self) -> usize {
        self.n_in * self.n_out
    }

    fn param_len(&self) -> usize {
        self.weight_len() + self.n_out
    }

    fn bias_offset(&self) -> usize {
        self.offset + self.weight_len()
    }

    /// `out = W x + b`
    fn apply(&self, params: &[f64], x: &[f64], out: &mut [f64]) {
        let w = &params[self.offset..self.offset + self.weight_len()];
        let b = &params[self.bias_offset()..self.bias_offset() + self.n_out];
        for (o, (row, bias)) in out.iter_mut().zip(w.chunks_exact(self.n_in).zip(b)) {
            *o = bias + row.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
        }
    }

    /// Accumulates weight/bias gradients for upstream `delta` and input `x`,
    /// and writes `W^T delta` into `back`.
    /// Accumulates this layer's gradient and, when `back` is given, the
    /// gradient with respect to its input.
    fn backward(&self, params: &[f64], grad: &mut [f64], x: &[f64], delta: &[f64], back: Option<&mut [f64]>) {
        let (w_len, b_off) = (self.weight_len(), self.bias_offset());
        let gw = &mut grad[self.offset..self.offset + w_len];
        for (g_row, &d) in gw.chunks_exact_mut(self.n_in).zip(delta) {
            for (g, xi) in g_row.iter_mut().zip(x) {
                *g += d * xi;
            }
        }
        for (g, d) in grad[b_off..b_off + self.n_out].iter_mut().zip(delta) {
            *g += d;
        }
        if let Some(back) = back {
            let w = &params[self.offset..self.offset + w_len];
            back.iter_mut().for_each(|v| *v = 0.0);
            for (row, &d) in w.chunks_exact(self.n_in).zip(delta) {
                for (b, wi) in back.iter_mut().zip(row) {
                    *b += wi * d;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeModel {
    input_dim: usize,
    hidden_dim: usize,
    latent_dim: usize,
    params: Vec<f64>,
}

/// Activations of one window kept for backpropagation.
pub(crate) struct Trace {
    pub h1: Vec<f64>,
    pub z: Vec<f64>,
    pub h3: Vec<f64>,
    pub y: Vec<f64>,
}

impl AeModel {
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    /// All weights and biases, layer by layer.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub(crate) fn layers(&self) -> [Layer; 4] {
        let dims = [self.input_dim, self.hidden_dim, self.latent_dim, self.hidden_dim, self.input_dim];
        let mut offset = 0;
        let mut out = [Layer { n_in: 0, n_out: 0, offset: 0 }; 4];
        for (i, layer) in out.iter_mut().enumerate() {
            *layer = Layer { n_in: dims[i], n_out: dims[i + 1], offset };
            offset += layer.param_len();
        }
        out
    }

    pub(crate) fn forward(&self, x: &[f64]) -> Trace {
        let [l0, l1, l2, l3] = self.layers();
        let mut h1 = vec![0.0; self.hidden_dim];
        l0.apply(&self.params, x, &mut h1);
        h1.iter_mut().for_each(|v| *v = v.tanh());
        let mut z = vec![0.0; self.latent_dim];
        l1.apply(&self.params, &h1, &mut z);
        let mut h3 = vec![0.0; self.hidden_dim];
        l2.apply(&self.params, &z, &mut h3);
        h3.iter_mut().for_each(|v| *v = v.tanh());
        let mut y = vec![0.0; self.input_dim];
        l3.apply(&self.params, &h3, &mut y);
        Trace { h1, z, h3, y }
    }

    pub fn encode_one(&self, x: &[f64]) -> Vec<f64> {
        let [l0, l1, _, _] = self.layers();
        let mut h1 = vec![0.0; self.hidden_dim];
        l0.apply(&self.params, x, &mut h1);
        h1.iter_mut().for_each(|v| *v = v.tanh());
        let mut z = vec![0.0; self.latent_dim];
        l1.apply(&self.params, &h1, &mut z);
        z
    }

    pub(crate) fn check_dim(&self, windows: &SpectralWindowSet) -> Result<()> {
        match windows.features.iter().find(|f| f.len() != self.input_dim) {
            Some(f) => Err(Error::DimensionMismatch { expected: self.input_dim, got: f.len() }),
            None => Ok(()),
        }
    }

    /// Accumulate the gradient of one window's contribution. `dy` is the loss
    /// gradient at the output, `dz_extra` the extra gradient at the latent.
    pub(crate) fn backward(&self, x: &[f64], trace: &Trace, dy: &[f64], dz_extra: &[f64], grad: &mut [f64]) {
        let [l0, l1, l2, l3] = self.layers();
        let mut dh3 = vec![0.0; self.hidden_dim];
        l3.backward(&self.params, grad, &trace.h3, dy, Some(&mut dh3));
        for (d, h) in dh3.iter_mut().zip(&trace.h3) {
            *d *= 1.0 - h * h;
        }
        let mut dz = vec![0.0; self.latent_dim];
        l2.backward(&self.params, grad, &trace.z, &dh3, Some(&mut dz));
        for (d, e) in dz.iter_mut().zip(dz_extra) {
            *d += e;
        }
        let mut dh1 = vec![0.0; self.hidden_dim];
        l1.backward(&self.params, grad, &trace.h1, &dz, Some(&mut dh1));
        for (d, h) in dh1.iter_mut().zip(&trace.h1) {
            *d *= 1.0 - h * h;
        }
        l0.backward(&self.params, grad, x, &dh1, None);
    }
}

/// Uniform weights in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, zero biases.
pub fn init_model(cfg: &AeConfig, input_dim: usize) -> Result<AeModel> {
    cfg.validate(input_dim)?;
    let mut model = AeModel { input_dim, hidden_dim: cfg.hidden_dim, latent_dim: cfg.latent_dim, params: Vec::new() };
    let last = model.layers()[3];
    model.params = vec![0.0; last.offset + last.param_len()];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for layer in model.layers() {
        let bound = 1.0 / (layer.n_in as f64).sqrt();
        for w in &mut model.params[layer.offset..layer.offset + layer.weight_len()] {
            *w = (2.0 * rng.gen::<f64>() - 1.0) * bound;
        }
    }
    Ok(model)
}
