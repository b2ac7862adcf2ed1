//! Minimal fully connected network: tanh hidden layers, softmax output,
//! cross-entropy loss, mini-batch SGD with momentum. Written flat over
//! `Vec<f64>` so training stays deterministic and dependency-free.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Fully connected network. `weights[l]` is row-major `[out][in]` for layer
/// `l`; every layer but the last applies tanh, the last feeds softmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Mlp {
    /// Xavier-uniform initialization; the draw order is fixed so a seeded
    /// generator reproduces the network exactly.
    pub fn init<R: Rng>(layer_sizes: &[usize], rng: &mut R) -> Mlp {
        assert!(layer_sizes.len() >= 2, "need at least input and output layer");
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w: Vec<f64> =
                (0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)).collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Mlp { layer_sizes: layer_sizes.to_vec(), weights, biases }
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    fn layer_count(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Activations per layer: `[input, hidden..., probabilities]`.
    fn forward_cached(&self, x: &[f64]) -> Vec<Vec<f64>> {
        debug_assert_eq!(x.len(), self.input_dim());
        let mut acts = Vec::with_capacity(self.layer_count() + 1);
        acts.push(x.to_vec());
        for l in 0..self.layer_count() {
            let (n_in, n_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let prev = &acts[l];
            let mut z = self.biases[l].clone();
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &self.weights[l][o * n_in..(o + 1) * n_in];
                let mut acc = 0.0;
                for (w, a) in row.iter().zip(prev.iter()) {
                    acc += w * a;
                }
                *zo += acc;
            }
            debug_assert_eq!(z.len(), n_out);
            if l == self.layer_count() - 1 {
                acts.push(softmax(&z));
            } else {
                for zo in z.iter_mut() {
                    *zo = zo.tanh();
                }
                acts.push(z);
            }
        }
        acts
    }

    /// Class probabilities for one input.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_cached(x).pop().unwrap()
    }

    /// Most probable class; ties break toward the lower index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let probs = self.forward(x);
        let mut best = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > probs[best] {
                best = i;
            }
        }
        best
    }

    /// Weighted cross-entropy of one sample.
    pub fn loss(&self, x: &[f64], class: usize, weight: f64) -> f64 {
        let probs = self.forward(x);
        -weight * probs[class].max(1e-300).ln()
    }

    /// Accumulates the gradient of the weighted cross-entropy for one sample
    /// and returns its loss. Softmax plus cross-entropy gives the usual
    /// `p - onehot` error at the output.
    pub fn accumulate_gradient(
        &self,
        x: &[f64],
        class: usize,
        weight: f64,
        grads: &mut Gradients,
    ) -> f64 {
        let acts = self.forward_cached(x);
        let probs = acts.last().unwrap();
        let loss = -weight * probs[class].max(1e-300).ln();

        let mut delta: Vec<f64> = probs
            .iter()
            .enumerate()
            .map(|(i, &p)| weight * (p - if i == class { 1.0 } else { 0.0 }))
            .collect();

        for l in (0..self.layer_count()).rev() {
            let n_in = self.layer_sizes[l];
            let prev = &acts[l];
            for (o, &d) in delta.iter().enumerate() {
                grads.biases[l][o] += d;
                let row = &mut grads.weights[l][o * n_in..(o + 1) * n_in];
                for (g, a) in row.iter_mut().zip(prev.iter()) {
                    *g += d * a;
                }
            }
            if l > 0 {
                // Propagate through the tanh of the previous layer.
                let mut next_delta = vec![0.0; n_in];
                for (o, &d) in delta.iter().enumerate() {
                    let row = &self.weights[l][o * n_in..(o + 1) * n_in];
                    for (nd, &w) in next_delta.iter_mut().zip(row.iter()) {
                        *nd += d * w;
                    }
                }
                for (nd, a) in next_delta.iter_mut().zip(prev.iter()) {
                    *nd *= 1.0 - a * a;
                }
                delta = next_delta;
            }
        }
        loss
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Flat parameter access (weights of every layer, then biases), used by
    /// the finite-difference gradient check.
    pub fn get_param(&self, mut idx: usize) -> f64 {
        for w in &self.weights {
            if idx < w.len() {
                return w[idx];
            }
            idx -= w.len();
        }
        for b in &self.biases {
            if idx < b.len() {
                return b[idx];
            }
            idx -= b.len();
        }
        panic!("parameter index out of range");
    }

    pub fn set_param(&mut self, mut idx: usize, value: f64) {
        for w in &mut self.weights {
            if idx < w.len() {
                w[idx] = value;
                return;
            }
            idx -= w.len();
        }
        for b in &mut self.biases {
            if idx < b.len() {
                b[idx] = value;
                return;
            }
            idx -= b.len();
        }
        panic!("parameter index out of range");
    }
}

/// Gradient accumulator shaped like an [`Mlp`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(mlp: &Mlp) -> Gradients {
        Gradients {
            weights: mlp.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: mlp.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn reset(&mut self) {
        for w in &mut self.weights {
            w.fill(0.0);
        }
        for b in &mut self.biases {
            b.fill(0.0);
        }
    }

    pub fn get_param(&self, mut idx: usize) -> f64 {
        for w in &self.weights {
            if idx < w.len() {
                return w[idx];
            }
            idx -= w.len();
        }
        for b in &self.biases {
            if idx < b.len() {
                return b[idx];
            }
            idx -= b.len();
        }
        panic!("parameter index out of range");
    }
}

/// SGD with classical momentum.
#[derive(Debug, Clone)]
pub struct SgdOptimizer {
    learning_rate: f64,
    momentum: f64,
    vel_weights: Vec<Vec<f64>>,
    vel_biases: Vec<Vec<f64>>,
}

impl SgdOptimizer {
    pub fn new(mlp: &Mlp, learning_rate: f64, momentum: f64) -> SgdOptimizer {
        SgdOptimizer {
            learning_rate,
            momentum,
            vel_weights: mlp.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            vel_biases: mlp.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// One update from gradients already averaged over the batch.
    pub fn step(&mut self, mlp: &mut Mlp, grads: &Gradients) {
        for l in 0..mlp.weights.len() {
            for (i, g) in grads.weights[l].iter().enumerate() {
                let v = self.momentum * self.vel_weights[l][i] - self.learning_rate * g;
                self.vel_weights[l][i] = v;
                mlp.weights[l][i] += v;
            }
            for (i, g) in grads.biases[l].iter().enumerate() {
                let v = self.momentum * self.vel_biases[l][i] - self.learning_rate * g;
                self.vel_biases[l][i] = v;
                mlp.biases[l][i] += v;
            }
        }
    }
}

/// Deterministic Fisher-Yates shuffle of `0..n` from the given generator.
pub fn shuffled_indices(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}
