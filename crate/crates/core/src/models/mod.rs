//! Classifiers over any representation: multinomial logistic regression on
//! sparse count vectors and a sequence CNN (embedding, 1-D convolution,
//! sum pooling, MLP, softmax). Both train with Adam and share one
//! finite-difference gradient checker.

mod adam;
mod checkpoint;
mod cnn;
mod gradcheck;
mod lr;

pub use adam::AdamState;
pub use checkpoint::{Checkpoint, ModelKind, ModelParams, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use cnn::{cnn_train, CnnCache, CnnExample, CnnModel, CnnObjective, CnnShape};
pub use gradcheck::{gradient_check, relative_error, GradCheck, Objective};
pub use lr::{lr_train, LrModel, LrObjective};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::NUM_CLASSES;

/// Sparse feature vector as `(feature id, value)` pairs.
pub type SparseVec = Vec<(u32, f64)>;

/// Features of one document in the form a model consumes.
#[derive(Debug, Clone, Copy)]
pub enum ModelInput<'a> {
    Sparse(&'a SparseVec),
    Sequence(&'a [u32]),
}

pub fn sparse_from_counts(counts: &BTreeMap<u32, u32>) -> SparseVec {
    counts.iter().map(|(&id, &n)| (id, f64::from(n))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub d_emb: usize,
    pub n_filters: usize,
    pub window: usize,
    pub d_hidden: usize,
    pub max_seq_len: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            l2: 1e-4,
            dropout: 0.2,
            epochs: 20,
            batch_size: 16,
            seed: 0,
            d_emb: 64,
            n_filters: 128,
            window: 3,
            d_hidden: 64,
            max_seq_len: 5000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout must be in [0, 1), got {}", self.dropout));
        }
        if self.l2 < 0.0 {
            return bad(format!("l2 must be non-negative, got {}", self.l2));
        }
        if self.batch_size == 0 || self.window == 0 || self.max_seq_len < self.window {
            return bad("batch size and window must be positive, max_seq_len >= window".into());
        }
        if self.d_emb == 0 || self.n_filters == 0 || self.d_hidden == 0 {
            return bad("layer sizes must be positive".into());
        }
        Ok(())
    }
}

/// Per-epoch mean training loss (data term plus L2 penalty).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LossCurve(pub Vec<f64>);

/// In-place numerically stable softmax.
pub(crate) fn softmax(logits: &mut [f64; NUM_CLASSES]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - max).exp();
        sum += *l;
    }
    for l in logits.iter_mut() {
        *l /= sum;
    }
}

/// `-ln p[label]`, from probabilities, floored to stay finite.
pub(crate) fn cross_entropy(probs: &[f64; NUM_CLASSES], label: usize) -> f64 {
    -probs[label].max(f64::MIN_POSITIVE).ln()
}

pub(crate) fn check_labels(labels: impl Iterator<Item = usize>) -> Result<()> {
    let mut seen = [false; NUM_CLASSES];
    let mut n = 0;
    for l in labels {
        if l >= NUM_CLASSES {
            return Err(Error::InvalidInput(format!("label index {l} out of range")));
        }
        seen[l] = true;
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty training set".into()));
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(Error::InvalidInput("training labels span a single class".into()));
    }
    Ok(())
}

pub fn argmax(probs: &[f64; NUM_CLASSES]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    best
}
