use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax, check_labels, cross_entropy, softmax, AdamState, LossCurve, Objective, TrainConfig};
use crate::error::{Error, Result};
use crate::features::UNK;
use crate::labeling::NUM_CLASSES;

/// Dimensions of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnnShape {
    pub vocab_size: usize,
    pub d_emb: usize,
    pub n_filters: usize,
    pub window: usize,
    pub d_hidden: usize,
    pub max_seq_len: usize,
}

impl CnnShape {
    pub fn new(vocab_size: usize, config: &TrainConfig) -> Self {
        CnnShape {
            vocab_size,
            d_emb: config.d_emb,
            n_filters: config.n_filters,
            window: config.window,
            d_hidden: config.d_hidden,
            max_seq_len: config.max_seq_len,
        }
    }

    fn layout(&self) -> Layout {
        let emb = 0;
        let conv_w = emb + self.vocab_size * self.d_emb;
        let conv_b = conv_w + self.n_filters * self.window * self.d_emb;
        let hid_w = conv_b + self.n_filters;
        let hid_b = hid_w + self.d_hidden * self.n_filters;
        let out_w = hid_b + self.d_hidden;
        let out_b = out_w + NUM_CLASSES * self.d_hidden;
        Layout {
            conv_w,
            conv_b,
            hid_w,
            hid_b,
            out_w,
            out_b,
            total: out_b + NUM_CLASSES,
        }
    }

    pub fn n_params(&self) -> usize {
        self.layout().total
    }
}

/// Offsets into the flat parameter vector. Embeddings start at 0.
#[derive(Debug, Clone, Copy)]
struct Layout {
    conv_w: usize,
    conv_b: usize,
    hid_w: usize,
    hid_b: usize,
    out_w: usize,
    out_b: usize,
    total: usize,
}

impl Layout {
    /// Ranges of weight matrices under L2, excluding the UNK embedding row.
    fn regularized(&self, d_emb: usize) -> [std::ops::Range<usize>; 4] {
        [
            d_emb..self.conv_w,
            self.conv_w..self.conv_b,
            self.hid_w..self.hid_b,
            self.out_w..self.out_b,
        ]
    }
}

/// One training example: prepared sequence, label and optional dropout mask.
pub type CnnExample<'a> = (&'a [u32], usize, Option<&'a [f64]>);

/// Embedding, valid 1-D convolution with ReLU, sum pooling over positions,
/// inverted dropout, one ReLU hidden layer and a softmax output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnModel {
    pub shape: CnnShape,
    pub params: Vec<f64>,
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct CnnCache {
    /// Input after truncation, UNK mapping and padding.
    pub seq: Vec<u32>,
    /// Convolution pre-activations, positions x filters.
    pub conv_pre: Vec<f64>,
    pub pooled: Vec<f64>,
    pub mask: Option<Vec<f64>>,
    pub dropped: Vec<f64>,
    pub hidden_pre: Vec<f64>,
    pub hidden: Vec<f64>,
    pub probs: [f64; NUM_CLASSES],
}

impl CnnCache {
    /// Smallest distance of any ReLU input from the kink at zero. Finite
    /// differences are only trustworthy when this exceeds the step size.
    pub fn min_relu_margin(&self) -> f64 {
        self.conv_pre
            .iter()
            .chain(&self.hidden_pre)
            .map(|v| v.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

struct ExampleGrad {
    loss: f64,
    /// Gradient for every parameter after the embedding table.
    dense: Vec<f64>,
    emb: BTreeMap<u32, Vec<f64>>,
}

fn glorot(rng: &mut ChaCha8Rng, out: &mut [f64], fan_in: usize, fan_out: usize) {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    for w in out {
        *w = rng.random_range(-a..a);
    }
}

fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

impl CnnModel {
    /// Glorot-uniform weights and zero biases.
    pub fn init(shape: CnnShape, rng: &mut ChaCha8Rng) -> Self {
        let l = shape.layout();
        let mut params = vec![0.0; l.total];
        glorot(rng, &mut params[..l.conv_w], shape.vocab_size, shape.d_emb);
        glorot(
            rng,
            &mut params[l.conv_w..l.conv_b],
            shape.window * shape.d_emb,
            shape.n_filters,
        );
        glorot(rng, &mut params[l.hid_w..l.hid_b], shape.n_filters, shape.d_hidden);
        glorot(rng, &mut params[l.out_w..l.out_b], shape.d_hidden, NUM_CLASSES);
        CnnModel { shape, params }
    }

    pub fn from_params(shape: CnnShape, params: Vec<f64>) -> Result<Self> {
        if params.len() != shape.n_params() {
            return Err(Error::Consistency(format!(
                "CNN expects {} parameters, got {}",
                shape.n_params(),
                params.len()
            )));
        }
        Ok(CnnModel { shape, params })
    }

    /// Truncates to `max_seq_len`, maps out-of-range ids to UNK and pads
    /// short inputs with UNK up to the window size.
    pub fn prepare(&self, seq: &[u32]) -> Result<Vec<u32>> {
        if seq.is_empty() {
            return Err(Error::InvalidInput("CNN input sequence is empty".into()));
        }
        let v = self.shape.vocab_size as u32;
        let mut out: Vec<u32> = seq
            .iter()
            .take(self.shape.max_seq_len)
            .map(|&id| if id < v { id } else { UNK })
            .collect();
        if out.len() < self.shape.window {
            out.resize(self.shape.window, UNK);
        }
        Ok(out)
    }

    /// Forward pass. `mask` scales the pooled vector (inverted dropout);
    /// `None` is evaluation mode.
    pub fn forward(&self, seq: &[u32], mask: Option<&[f64]>) -> Result<CnnCache> {
        Ok(forward_with(&self.params, &self.shape, self.prepare(seq)?, mask))
    }

    pub fn predict_proba(&self, seq: &[u32]) -> Result<[f64; NUM_CLASSES]> {
        Ok(self.forward(seq, None)?.probs)
    }

    pub fn predict(&self, seq: &[u32]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(seq)?))
    }

    /// Embedding row of `id`.
    pub fn embedding(&self, id: u32) -> &[f64] {
        let d = self.shape.d_emb;
        &self.params[id as usize * d..(id as usize + 1) * d]
    }

    fn l2_penalty(params: &[f64], shape: &CnnShape, l2: f64) -> f64 {
        let sq: f64 = shape
            .layout()
            .regularized(shape.d_emb)
            .into_iter()
            .map(|r| params[r].iter().map(|w| w * w).sum::<f64>())
            .sum();
        0.5 * l2 * sq
    }

    /// Mean cross-entropy over the batch plus the L2 penalty, and the full
    /// gradient. Each example is `(prepared sequence, label, dropout mask)`.
    pub fn loss_and_grad(&self, batch: &[CnnExample], l2: f64) -> Result<(f64, Vec<f64>)> {
        let prepared = batch
            .iter()
            .map(|(s, _, _)| self.prepare(s))
            .collect::<Result<Vec<_>>>()?;
        let scale = 1.0 / batch.len().max(1) as f64;
        let parts: Vec<ExampleGrad> = prepared
            .into_par_iter()
            .zip(batch.par_iter())
            .map(|(seq, &(_, y, mask))| {
                let cache = forward_with(&self.params, &self.shape, seq, mask);
                backward(&self.params, &self.shape, &cache, y, scale)
            })
            .collect();
        Ok(self.accumulate(parts, l2))
    }

    fn accumulate(&self, parts: Vec<ExampleGrad>, l2: f64) -> (f64, Vec<f64>) {
        let l = self.shape.layout();
        let d = self.shape.d_emb;
        let mut grad = vec![0.0; l.total];
        let mut loss = 0.0;
        for part in parts {
            loss += part.loss;
            for (g, v) in grad[l.conv_w..].iter_mut().zip(&part.dense) {
                *g += v;
            }
            for (id, row) in part.emb {
                let base = id as usize * d;
                for (g, v) in grad[base..base + d].iter_mut().zip(&row) {
                    *g += v;
                }
            }
        }
        loss += Self::l2_penalty(&self.params, &self.shape, l2);
        if l2 > 0.0 {
            for r in l.regularized(d) {
                for i in r {
                    grad[i] += l2 * self.params[i];
                }
            }
        }
        (loss, grad)
    }
}

fn forward_with(params: &[f64], shape: &CnnShape, seq: Vec<u32>, mask: Option<&[f64]>) -> CnnCache {
    let l = shape.layout();
    let (d, nf, w, dh) = (shape.d_emb, shape.n_filters, shape.window, shape.d_hidden);
    let positions = seq.len() + 1 - w;
    let conv_w = &params[l.conv_w..l.conv_b];
    let conv_b = &params[l.conv_b..l.hid_w];

    let mut conv_pre = vec![0.0; positions * nf];
    let mut pooled = vec![0.0; nf];
    let mut x = vec![0.0; w * d];
    for p in 0..positions {
        for k in 0..w {
            let id = seq[p + k] as usize;
            x[k * d..(k + 1) * d].copy_from_slice(&params[id * d..(id + 1) * d]);
        }
        for f in 0..nf {
            let row = &conv_w[f * w * d..(f + 1) * w * d];
            let z = conv_b[f] + row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
            conv_pre[p * nf + f] = z;
            pooled[f] += relu(z);
        }
    }

    let dropped: Vec<f64> = match mask {
        Some(m) => pooled.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => pooled.clone(),
    };
    let hid_w = &params[l.hid_w..l.hid_b];
    let hid_b = &params[l.hid_b..l.out_w];
    let hidden_pre: Vec<f64> = (0..dh)
        .map(|k| {
            hid_b[k]
                + hid_w[k * nf..(k + 1) * nf]
                    .iter()
                    .zip(&dropped)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
        })
        .collect();
    let hidden: Vec<f64> = hidden_pre.iter().map(|&z| relu(z)).collect();
    let out_w = &params[l.out_w..l.out_b];
    let out_b = &params[l.out_b..l.total];
    let mut probs = [0.0; NUM_CLASSES];
    for (c, pc) in probs.iter_mut().enumerate() {
        *pc = out_b[c]
            + out_w[c * dh..(c + 1) * dh]
                .iter()
                .zip(&hidden)
                .map(|(a, b)| a * b)
                .sum::<f64>();
    }
    softmax(&mut probs);
    CnnCache {
        seq,
        conv_pre,
        pooled,
        mask: mask.map(<[f64]>::to_vec),
        dropped,
        hidden_pre,
        hidden,
        probs,
    }
}

fn backward(params: &[f64], shape: &CnnShape, cache: &CnnCache, label: usize, scale: f64) -> ExampleGrad {
    let l = shape.layout();
    let (d, nf, w, dh) = (shape.d_emb, shape.n_filters, shape.window, shape.d_hidden);
    let off = l.conv_w;
    let mut dense = vec![0.0; l.total - off];

    let mut dlogits = cache.probs;
    dlogits[label] -= 1.0;
    for v in dlogits.iter_mut() {
        *v *= scale;
    }

    let out_w = &params[l.out_w..l.out_b];
    let mut dhidden = vec![0.0; dh];
    for (c, &g) in dlogits.iter().enumerate() {
        dense[l.out_b - off + c] += g;
        for k in 0..dh {
            dense[l.out_w - off + c * dh + k] += g * cache.hidden[k];
            dhidden[k] += out_w[c * dh + k] * g;
        }
    }

    let hid_w = &params[l.hid_w..l.hid_b];
    let mut ddropped = vec![0.0; nf];
    for k in 0..dh {
        if cache.hidden_pre[k] <= 0.0 {
            continue;
        }
        let g = dhidden[k];
        dense[l.hid_b - off + k] += g;
        for f in 0..nf {
            dense[l.hid_w - off + k * nf + f] += g * cache.dropped[f];
            ddropped[f] += hid_w[k * nf + f] * g;
        }
    }
    let dpooled: Vec<f64> = match &cache.mask {
        Some(m) => ddropped.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => ddropped,
    };

    let conv_w = &params[l.conv_w..l.conv_b];
    let positions = cache.seq.len() + 1 - w;
    let mut emb: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    let mut dx = vec![0.0; w * d];
    for p in 0..positions {
        dx.iter_mut().for_each(|v| *v = 0.0);
        let mut any = false;
        for f in 0..nf {
            if cache.conv_pre[p * nf + f] <= 0.0 || dpooled[f] == 0.0 {
                continue;
            }
            any = true;
            let g = dpooled[f];
            dense[l.conv_b - off + f] += g;
            let row = &conv_w[f * w * d..(f + 1) * w * d];
            let drow = &mut dense[l.conv_w - off + f * w * d..l.conv_w - off + (f + 1) * w * d];
            for k in 0..w {
                let id = cache.seq[p + k] as usize;
                let e = &params[id * d..(id + 1) * d];
                for j in 0..d {
                    drow[k * d + j] += g * e[j];
                    dx[k * d + j] += g * row[k * d + j];
                }
            }
        }
        if any {
            for k in 0..w {
                let row = emb.entry(cache.seq[p + k]).or_insert_with(|| vec![0.0; d]);
                for (r, v) in row.iter_mut().zip(&dx[k * d..(k + 1) * d]) {
                    *r += v;
                }
            }
        }
    }

    ExampleGrad {
        loss: cross_entropy(&cache.probs, label) * scale,
        dense,
        emb,
    }
}

fn dropout_mask(rng: &mut ChaCha8Rng, n: usize, rate: f64) -> Option<Vec<f64>> {
    if rate <= 0.0 {
        return None;
    }
    let keep = 1.0 / (1.0 - rate);
    Some(
        (0..n)
            .map(|_| if rng.random::<f64>() < rate { 0.0 } else { keep })
            .collect(),
    )
}

/// Trains a fresh network. Minibatch gradients are computed in parallel
/// and reduced in example order, so results do not depend on thread count.
pub fn cnn_train(
    train: &[(Vec<u32>, usize)],
    vocab_size: usize,
    config: &TrainConfig,
) -> Result<(CnnModel, LossCurve)> {
    config.validate()?;
    check_labels(train.iter().map(|(_, y)| *y))?;
    if vocab_size == 0 {
        return Err(Error::InvalidInput("empty vocabulary".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = CnnModel::init(CnnShape::new(vocab_size, config), &mut rng);
    for (seq, _) in train {
        model.prepare(seq)?;
    }
    let mut adam = AdamState::new(model.params.len(), config.learning_rate);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let masks: Vec<Option<Vec<f64>>> = chunk
                .iter()
                .map(|_| dropout_mask(&mut rng, config.n_filters, config.dropout))
                .collect();
            let batch: Vec<CnnExample> = chunk
                .iter()
                .zip(&masks)
                .map(|(&i, m)| (train[i].0.as_slice(), train[i].1, m.as_deref()))
                .collect();
            let (loss, grad) = model.loss_and_grad(&batch, config.l2)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss { epoch, batch: b });
            }
            epoch_loss += loss * chunk.len() as f64;
            adam.step(&mut model.params, &grad);
        }
        let mean = epoch_loss / train.len() as f64;
        log::debug!("cnn epoch {epoch}: loss {mean:.6}");
        curve.push(mean);
    }
    Ok((model, LossCurve(curve)))
}

/// Loss of a CNN on a fixed batch with fixed dropout masks, as a function
/// of its parameters.
pub struct CnnObjective<'a> {
    pub model: &'a CnnModel,
    pub batch: Vec<CnnExample<'a>>,
    pub l2: f64,
}

impl CnnObjective<'_> {
    fn at(&self, params: &[f64]) -> CnnModel {
        CnnModel {
            shape: self.model.shape,
            params: params.to_vec(),
        }
    }
}

impl Objective for CnnObjective<'_> {
    fn parameters(&self) -> Vec<f64> {
        self.model.params.clone()
    }

    fn loss_at(&self, params: &[f64]) -> f64 {
        let m = self.at(params);
        let scale = 1.0 / self.batch.len().max(1) as f64;
        let data: f64 = self
            .batch
            .iter()
            .map(|&(s, y, mask)| {
                let c = m.forward(s, mask).expect("prepared batch");
                cross_entropy(&c.probs, y) * scale
            })
            .sum();
        data + CnnModel::l2_penalty(params, &m.shape, self.l2)
    }

    fn gradient_at(&self, params: &[f64]) -> Vec<f64> {
        self.at(params)
            .loss_and_grad(&self.batch, self.l2)
            .expect("prepared batch")
            .1
    }
}
