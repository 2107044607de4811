use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_labels, cross_entropy, softmax, AdamState, LossCurve, Objective, SparseVec, TrainConfig};
use crate::error::{Error, Result};
use crate::labeling::NUM_CLASSES;

/// Multinomial logistic regression. Parameters are stored flat: the
/// `NUM_CLASSES x n_features` weight matrix row-major, then the biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    pub n_features: usize,
    pub params: Vec<f64>,
}

impl LrModel {
    pub fn zeros(n_features: usize) -> Self {
        LrModel {
            n_features,
            params: vec![0.0; NUM_CLASSES * n_features + NUM_CLASSES],
        }
    }

    pub fn from_params(n_features: usize, params: Vec<f64>) -> Result<Self> {
        if params.len() != NUM_CLASSES * n_features + NUM_CLASSES {
            return Err(Error::Consistency(format!(
                "logistic regression expects {} parameters, got {}",
                NUM_CLASSES * n_features + NUM_CLASSES,
                params.len()
            )));
        }
        Ok(LrModel { n_features, params })
    }

    fn n_weights(&self) -> usize {
        NUM_CLASSES * self.n_features
    }

    pub fn weight(&self, class: usize, feature: usize) -> f64 {
        self.params[class * self.n_features + feature]
    }

    pub fn bias(&self, class: usize) -> f64 {
        self.params[self.n_weights() + class]
    }

    /// Weight row for one class.
    pub fn class_weights(&self, class: usize) -> &[f64] {
        &self.params[class * self.n_features..(class + 1) * self.n_features]
    }

    fn logits_with(params: &[f64], n_features: usize, x: &SparseVec) -> [f64; NUM_CLASSES] {
        let nw = NUM_CLASSES * n_features;
        let mut z = [0.0; NUM_CLASSES];
        for (c, zc) in z.iter_mut().enumerate() {
            let row = &params[c * n_features..(c + 1) * n_features];
            *zc = params[nw + c]
                + x.iter()
                    .filter(|(j, _)| (*j as usize) < n_features)
                    .map(|&(j, v)| row[j as usize] * v)
                    .sum::<f64>();
        }
        z
    }

    /// Class probabilities. Feature ids beyond the vocabulary are ignored.
    pub fn predict_proba(&self, x: &SparseVec) -> [f64; NUM_CLASSES] {
        let mut z = Self::logits_with(&self.params, self.n_features, x);
        softmax(&mut z);
        z
    }

    pub fn predict(&self, x: &SparseVec) -> usize {
        super::argmax(&self.predict_proba(x))
    }

    /// Mean cross-entropy over `batch` plus `(l2 / 2) * ||W||^2`, and its
    /// gradient. Biases are not regularized.
    pub fn loss_and_grad(&self, batch: &[(&SparseVec, usize)], l2: f64) -> (f64, Vec<f64>) {
        loss_and_grad(&self.params, self.n_features, batch, l2, true)
    }
}

fn loss_and_grad(
    params: &[f64],
    n_features: usize,
    batch: &[(&SparseVec, usize)],
    l2: f64,
    want_grad: bool,
) -> (f64, Vec<f64>) {
    let nw = NUM_CLASSES * n_features;
    let mut grad = if want_grad { vec![0.0; params.len()] } else { Vec::new() };
    let scale = 1.0 / batch.len().max(1) as f64;
    let mut loss = 0.0;
    for &(x, y) in batch {
        let mut p = LrModel::logits_with(params, n_features, x);
        softmax(&mut p);
        loss += cross_entropy(&p, y) * scale;
        if want_grad {
            for (c, &pc) in p.iter().enumerate() {
                let d = (pc - if c == y { 1.0 } else { 0.0 }) * scale;
                grad[nw + c] += d;
                for &(j, v) in x.iter().filter(|(j, _)| (*j as usize) < n_features) {
                    grad[c * n_features + j as usize] += d * v;
                }
            }
        }
    }
    let w = &params[..nw];
    loss += 0.5 * l2 * w.iter().map(|x| x * x).sum::<f64>();
    if want_grad {
        for (g, &wi) in grad[..nw].iter_mut().zip(w) {
            *g += l2 * wi;
        }
    }
    (loss, grad)
}

/// Trains from zero weights with Adam on shuffled minibatches.
pub fn lr_train(train: &[(SparseVec, usize)], n_features: usize, config: &TrainConfig) -> Result<(LrModel, LossCurve)> {
    config.validate()?;
    check_labels(train.iter().map(|(_, y)| *y))?;
    let mut model = LrModel::zeros(n_features);
    let mut adam = AdamState::new(model.params.len(), config.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<(&SparseVec, usize)> = chunk.iter().map(|&i| (&train[i].0, train[i].1)).collect();
            let (loss, grad) = model.loss_and_grad(&batch, config.l2);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: b });
            }
            epoch_loss += loss * chunk.len() as f64;
            adam.step(&mut model.params, &grad);
        }
        let mean = epoch_loss / train.len() as f64;
        log::debug!("lr epoch {epoch}: loss {mean:.6}");
        curve.push(mean);
    }
    Ok((model, LossCurve(curve)))
}

/// Loss of an LR model on a fixed batch, as a function of its parameters.
pub struct LrObjective<'a> {
    pub model: &'a LrModel,
    pub batch: Vec<(&'a SparseVec, usize)>,
    pub l2: f64,
}

impl Objective for LrObjective<'_> {
    fn parameters(&self) -> Vec<f64> {
        self.model.params.clone()
    }

    fn loss_at(&self, params: &[f64]) -> f64 {
        loss_and_grad(params, self.model.n_features, &self.batch, self.l2, false).0
    }

    fn gradient_at(&self, params: &[f64]) -> Vec<f64> {
        loss_and_grad(params, self.model.n_features, &self.batch, self.l2, true).1
    }
}
