use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::adam::AdamState;
use super::{softmax2, ProbabilisticClassifier};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::rng;

/// Training hyper-parameters for [`Mlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_layers: vec![32],
            learning_rate: 1e-4,
            batch_size: 500,
            epochs: 300,
            seed: 0,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1".into()));
        }
        if self.hidden_layers.contains(&0) {
            return Err(Error::InvalidConfig("hidden layer of width 0".into()));
        }
        Ok(())
    }
}

/// Per-epoch mean training loss.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitReport {
    pub epoch_losses: Vec<f64>,
}

impl FitReport {
    pub fn final_loss(&self) -> f64 {
        self.epoch_losses.last().copied().unwrap_or(f64::NAN)
    }

    pub fn initial_loss(&self) -> f64 {
        self.epoch_losses.first().copied().unwrap_or(f64::NAN)
    }
}

/// Fully connected ReLU network with a two-way softmax output.
///
/// Parameters live in one flat vector: for each layer the weight matrix
/// (row-major, `out x in`) followed by its bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

struct LayerSpan {
    n_in: usize,
    n_out: usize,
    weights: usize,
    bias: usize,
}

impl Mlp {
    /// Fresh network with Glorot-uniform weights and zero biases.
    pub fn new(n_inputs: usize, hidden_layers: &[usize], seed: u64) -> Self {
        let mut sizes = Vec::with_capacity(hidden_layers.len() + 2);
        sizes.push(n_inputs);
        sizes.extend_from_slice(hidden_layers);
        sizes.push(2);
        let n_params = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        let mut params = vec![0.0; n_params];
        let mut rng = rng::seeded(seed);
        let mut offset = 0;
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for p in &mut params[offset..offset + fan_in * fan_out] {
                *p = rng.random_range(-limit..=limit);
            }
            offset += fan_in * fan_out + fan_out;
        }
        Self { sizes, params }
    }

    /// Trains a freshly initialised network.
    pub fn fit(config: &MlpConfig, train: &Dataset) -> Result<(Self, FitReport)> {
        config.validate()?;
        let model = Self::new(train.n_features(), &config.hidden_layers, config.seed);
        model.fit_from(config, train)
    }

    /// Continues training from the current parameters (warm start).
    pub fn fit_from(mut self, config: &MlpConfig, train: &Dataset) -> Result<(Self, FitReport)> {
        config.validate()?;
        if train.is_empty() {
            return Err(Error::Empty("training set has no rows".into()));
        }
        if train.n_features() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                got: train.n_features(),
            });
        }
        let mut adam = AdamState::new(self.params.len(), config.learning_rate);
        // Shuffle stream is separate from the initialisation stream.
        let mut rng = rng::seeded(rng::derive_seed(config.seed, 1));
        let mut order: Vec<usize> = (0..train.len()).collect();
        let mut scratch = Scratch::new(&self.sizes);
        let mut grad = vec![0.0; self.params.len()];
        let mut report = FitReport {
            epoch_losses: Vec::with_capacity(config.epochs),
        };
        for epoch in 0..config.epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for (batch_no, batch) in order.chunks(config.batch_size).enumerate() {
                let loss = self.accumulate_gradient(train, batch, &mut grad, &mut scratch);
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss {
                        epoch,
                        batch: batch_no,
                    });
                }
                epoch_loss += loss * batch.len() as f64;
                adam.update(&mut self.params, &grad);
            }
            report.epoch_losses.push(epoch_loss / train.len() as f64);
        }
        Ok((self, report))
    }

    pub fn n_inputs(&self) -> usize {
        self.sizes[0]
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn spans(&self) -> impl Iterator<Item = LayerSpan> + '_ {
        let mut offset = 0;
        self.sizes.windows(2).map(move |w| {
            let span = LayerSpan {
                n_in: w[0],
                n_out: w[1],
                weights: offset,
                bias: offset + w[0] * w[1],
            };
            offset += w[0] * w[1] + w[1];
            span
        })
    }

    /// Raw output-layer logits.
    pub fn logits(&self, x: &[f64]) -> [f64; 2] {
        let mut scratch = Scratch::new(&self.sizes);
        self.forward(x, &mut scratch);
        let out = scratch.activations.last().unwrap();
        [out[0], out[1]]
    }

    fn forward(&self, x: &[f64], scratch: &mut Scratch) {
        scratch.activations[0].copy_from_slice(x);
        let last = self.sizes.len() - 2;
        for (l, span) in self.spans().enumerate() {
            let (done, rest) = scratch.activations.split_at_mut(l + 1);
            let input = &done[l];
            let output = &mut rest[0];
            for o in 0..span.n_out {
                let row = &self.params[span.weights + o * span.n_in..span.weights + (o + 1) * span.n_in];
                let mut z = self.params[span.bias + o];
                for (w, a) in row.iter().zip(input.iter()) {
                    z += w * a;
                }
                output[o] = if l < last { z.max(0.0) } else { z };
            }
        }
    }

    /// Mean cross-entropy `-sum_c y_c log p_c` over `rows`.
    pub fn loss(&self, data: &Dataset, rows: &[usize]) -> f64 {
        let mut scratch = Scratch::new(&self.sizes);
        let total: f64 = rows
            .iter()
            .map(|&i| {
                self.forward(data.row(i), &mut scratch);
                sample_loss(scratch.activations.last().unwrap(), data.label(i))
            })
            .sum();
        total / rows.len() as f64
    }

    /// Mean loss over `rows` and its gradient with respect to every
    /// parameter.
    pub fn loss_and_gradient(&self, data: &Dataset, rows: &[usize]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let mut scratch = Scratch::new(&self.sizes);
        let loss = self.accumulate_gradient(data, rows, &mut grad, &mut scratch);
        (loss, grad)
    }

    fn accumulate_gradient(
        &self,
        data: &Dataset,
        rows: &[usize],
        grad: &mut [f64],
        scratch: &mut Scratch,
    ) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let spans: Vec<LayerSpan> = self.spans().collect();
        let n_layers = spans.len();
        let mut total = 0.0;
        for &i in rows {
            self.forward(data.row(i), scratch);
            let logits = scratch.activations.last().unwrap();
            let target = data.label(i);
            total += sample_loss(logits, target);

            // dL/dz for softmax + cross-entropy with targets summing to 1.
            let p = softmax2([logits[0], logits[1]]);
            let delta = scratch.deltas.last_mut().unwrap();
            delta[0] = p[0] - target[0];
            delta[1] = p[1] - target[1];

            for l in (0..n_layers).rev() {
                let span = &spans[l];
                let input = &scratch.activations[l];
                let (lower, upper) = scratch.deltas.split_at_mut(l + 1);
                let delta = &upper[0];
                for o in 0..span.n_out {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    grad[span.bias + o] += d;
                    let g = &mut grad[span.weights + o * span.n_in..span.weights + (o + 1) * span.n_in];
                    for (gw, a) in g.iter_mut().zip(input.iter()) {
                        *gw += d * a;
                    }
                }
                if l > 0 {
                    // Back through the weights, then the ReLU of layer l-1.
                    let below = &mut lower[l];
                    for (k, b) in below.iter_mut().enumerate() {
                        if input[k] <= 0.0 {
                            *b = 0.0;
                            continue;
                        }
                        let mut s = 0.0;
                        for o in 0..span.n_out {
                            s += self.params[span.weights + o * span.n_in + k] * delta[o];
                        }
                        *b = s;
                    }
                }
            }
        }
        let scale = 1.0 / rows.len() as f64;
        grad.iter_mut().for_each(|g| *g *= scale);
        total * scale
    }

    /// Writes layer sizes and row-major weights as plain text.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let sizes: Vec<String> = self.sizes.iter().map(ToString::to_string).collect();
        writeln!(out, "layers {}", sizes.join(" "))?;
        for (l, span) in self.spans().enumerate() {
            writeln!(out, "weights {l} {} {}", span.n_out, span.n_in)?;
            for o in 0..span.n_out {
                let row = &self.params[span.weights + o * span.n_in..span.weights + (o + 1) * span.n_in];
                let row: Vec<String> = row.iter().map(ToString::to_string).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
            let bias: Vec<String> = self.params[span.bias..span.bias + span.n_out]
                .iter()
                .map(ToString::to_string)
                .collect();
            writeln!(out, "bias {l} {}", bias.join(" "))?;
        }
        Ok(())
    }
}

/// Cross-entropy through log-softmax, finite for any finite logits.
fn sample_loss(logits: &[f64], target: &Label) -> f64 {
    let max = logits[0].max(logits[1]);
    let lse = max + ((logits[0] - max).exp() + (logits[1] - max).exp()).ln();
    let mut loss = 0.0;
    for c in 0..2 {
        if target[c] != 0.0 {
            loss -= target[c] * (logits[c] - lse);
        }
    }
    loss
}

struct Scratch {
    activations: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Scratch {
    fn new(sizes: &[usize]) -> Self {
        Self {
            activations: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            deltas: sizes.iter().map(|&s| vec![0.0; s]).collect(),
        }
    }
}

impl ProbabilisticClassifier for Mlp {
    fn predict_proba(&self, features: &[f64]) -> Label {
        softmax2(self.logits(features))
    }
}
