//! Multi-layer perceptron classifier trained with Adam on binary
//! cross-entropy. Two ReLU hidden layers of 32 units and a sigmoid output.
//!
//! The loss and its analytic backpropagation gradient are exposed on the
//! fitted model so they can be checked against finite differences.

use super::{LabelledSet, ProbabilisticClassifier};
use crate::rng::RngStream;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct MlpClassifier {
    pub hidden: [usize; 2],
    pub epochs: usize,
    pub batch_size: usize,
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
}

impl Default for MlpClassifier {
    fn default() -> Self {
        Self {
            hidden: [32, 32],
            epochs: 1000,
            batch_size: 32,
            step_size: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

/// One fully connected layer, weights stored row-major `out x in`.
#[derive(Debug, Clone)]
struct Dense {
    w: Vec<f64>,
    b: Vec<f64>,
    in_dim: usize,
    out_dim: usize,
}

impl Dense {
    fn init(in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> Self {
        // uniform scaled by fan-in
        let bound = (6.0 / in_dim as f64).sqrt();
        let w = (0..in_dim * out_dim).map(|_| rng.random_range(-bound..bound)).collect();
        Self { w, b: vec![0.0; out_dim], in_dim, out_dim }
    }

    fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.out_dim {
            let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
            out.push(row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b[o]);
        }
    }

    fn n_params(&self) -> usize {
        self.w.len() + self.b.len()
    }
}

#[derive(Debug, Clone)]
pub struct MlpModel {
    layers: Vec<Dense>,
    /// Set when the training data contained a single class; prediction then
    /// returns the empirical class rate and training is skipped.
    constant: Option<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl MlpModel {
    fn new(dim: usize, hidden: [usize; 2], rng: &mut impl Rng) -> Self {
        let layers = vec![
            Dense::init(dim, hidden[0], rng),
            Dense::init(hidden[0], hidden[1], rng),
            Dense::init(hidden[1], 1, rng),
        ];
        Self { layers, constant: None }
    }

    /// Pre-sigmoid output.
    fn logit(&self, x: &[f64]) -> f64 {
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for (li, layer) in self.layers.iter().enumerate() {
            layer.forward(&cur, &mut next);
            if li + 1 < self.layers.len() {
                for v in next.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur[0]
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Dense::n_params).sum()
    }

    /// All weights and biases, flattened layer by layer.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            p.extend_from_slice(&l.w);
            p.extend_from_slice(&l.b);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params());
        let mut off = 0;
        for l in &mut self.layers {
            let wn = l.w.len();
            let bn = l.b.len();
            l.w.copy_from_slice(&p[off..off + wn]);
            off += wn;
            l.b.copy_from_slice(&p[off..off + bn]);
            off += bn;
        }
    }

    /// Mean binary cross-entropy over the batch, computed from logits for
    /// numerical stability.
    pub fn loss(&self, x: &[Vec<f64>], z: &[u8]) -> f64 {
        assert_eq!(x.len(), z.len());
        let mut total = 0.0;
        for (xi, &zi) in x.iter().zip(z) {
            let logit = self.logit(xi);
            let y = zi as f64;
            total += logit.max(0.0) - logit * y + (-logit.abs()).exp().ln_1p();
        }
        total / x.len() as f64
    }

    /// Analytic gradient of the mean BCE loss, flattened like [`Self::params`].
    pub fn gradient(&self, x: &[Vec<f64>], z: &[u8]) -> Vec<f64> {
        assert_eq!(x.len(), z.len());
        let mut grad = vec![0.0; self.n_params()];
        let n_layers = self.layers.len();

        for (xi, &zi) in x.iter().zip(z) {
            // forward pass caching pre- and post-activation values
            let mut activations: Vec<Vec<f64>> = vec![xi.clone()];
            let mut pre: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
            for (li, layer) in self.layers.iter().enumerate() {
                let mut out = Vec::new();
                layer.forward(activations.last().unwrap(), &mut out);
                pre.push(out.clone());
                if li + 1 < n_layers {
                    for v in out.iter_mut() {
                        *v = v.max(0.0);
                    }
                }
                activations.push(out);
            }

            // dL/dlogit for sigmoid + BCE
            let mut delta = vec![sigmoid(pre[n_layers - 1][0]) - zi as f64];

            let mut offsets = Vec::with_capacity(n_layers);
            let mut off = 0;
            for l in &self.layers {
                offsets.push(off);
                off += l.n_params();
            }

            for li in (0..n_layers).rev() {
                let layer = &self.layers[li];
                let input = &activations[li];
                let base = offsets[li];
                for o in 0..layer.out_dim {
                    for i in 0..layer.in_dim {
                        grad[base + o * layer.in_dim + i] += delta[o] * input[i];
                    }
                    grad[base + layer.w.len() + o] += delta[o];
                }
                if li > 0 {
                    let mut prev_delta = vec![0.0; layer.in_dim];
                    for (i, pd) in prev_delta.iter_mut().enumerate() {
                        if pre[li - 1][i] > 0.0 {
                            *pd = (0..layer.out_dim)
                                .map(|o| delta[o] * layer.w[o * layer.in_dim + i])
                                .sum();
                        }
                    }
                    delta = prev_delta;
                }
            }
        }

        let scale = 1.0 / x.len() as f64;
        for g in grad.iter_mut() {
            *g *= scale;
        }
        grad
    }
}

impl MlpClassifier {
    pub fn fit(&self, data: &LabelledSet, stream: RngStream) -> MlpModel {
        if !data.has_both_classes() {
            return MlpModel { layers: Vec::new(), constant: Some(data.positive_fraction()) };
        }
        let mut rng = stream.rng();
        let mut model = MlpModel::new(data.dim(), self.hidden, &mut rng);

        let n_params = model.n_params();
        let mut params = model.params();
        let mut m = vec![0.0; n_params];
        let mut v = vec![0.0; n_params];
        let mut t = 0u64;

        let mut order: Vec<usize> = (0..data.len()).collect();
        for _ in 0..self.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(self.batch_size) {
                let bx: Vec<Vec<f64>> = chunk.iter().map(|&i| data.x[i].clone()).collect();
                let bz: Vec<u8> = chunk.iter().map(|&i| data.z[i]).collect();
                let grad = model.gradient(&bx, &bz);

                t += 1;
                let bc1 = 1.0 - self.beta1.powi(t as i32);
                let bc2 = 1.0 - self.beta2.powi(t as i32);
                for i in 0..n_params {
                    m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * grad[i];
                    v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
                    params[i] -=
                        self.step_size * (m[i] / bc1) / ((v[i] / bc2).sqrt() + self.adam_eps);
                }
                model.set_params(&params);
            }
        }
        model
    }
}

impl ProbabilisticClassifier for MlpModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        if let Some(c) = self.constant {
            return c;
        }
        sigmoid(self.logit(x))
    }
}
