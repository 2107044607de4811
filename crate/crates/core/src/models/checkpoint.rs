use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CnnModel, LossCurve, LrModel, ModelInput, TrainConfig};
use crate::error::{Error, Result};
use crate::features::Representation;
use crate::labeling::NUM_CLASSES;

pub const CHECKPOINT_FORMAT: &str = "socvar-model";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Cnn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Lr, ModelKind::Cnn];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::Cnn => "cnn",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Lr(LrModel),
    Cnn(CnnModel),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Lr(_) => ModelKind::Lr,
            ModelParams::Cnn(_) => ModelKind::Cnn,
        }
    }
}

/// A trained model with everything needed to use it again: its training
/// configuration and the hash of the vocabulary its inputs were built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub representation: Representation,
    pub vocab_hash: String,
    pub run: usize,
    pub config: TrainConfig,
    pub loss_curve: LossCurve,
    pub model: ModelParams,
}

impl Checkpoint {
    pub fn new(
        representation: Representation,
        vocab_hash: String,
        run: usize,
        config: TrainConfig,
        loss_curve: LossCurve,
        model: ModelParams,
    ) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            representation,
            vocab_hash,
            run,
            config,
            loss_curve,
            model,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer(&mut w, self)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Loads a checkpoint, refusing it when `expected_vocab_hash` differs
    /// from the hash it was trained with.
    pub fn load(path: &Path, expected_vocab_hash: Option<&str>) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_reader(BufReader::new(file))?;
        if ckpt.format != CHECKPOINT_FORMAT || ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Consistency(format!(
                "{}: unsupported checkpoint {} v{}",
                path.display(),
                ckpt.format,
                ckpt.version
            )));
        }
        if let Some(expected) = expected_vocab_hash {
            if expected != ckpt.vocab_hash {
                return Err(Error::VocabMismatch {
                    expected: ckpt.vocab_hash,
                    found: expected.to_string(),
                });
            }
        }
        ckpt.validate()?;
        Ok(ckpt)
    }

    fn validate(&self) -> Result<()> {
        match &self.model {
            ModelParams::Lr(m) => LrModel::from_params(m.n_features, m.params.clone()).map(|_| ()),
            ModelParams::Cnn(m) => CnnModel::from_params(m.shape, m.params.clone()).map(|_| ()),
        }
    }

    /// Class probabilities for one document.
    pub fn predict_proba(&self, input: ModelInput<'_>) -> Result<[f64; NUM_CLASSES]> {
        match (&self.model, input) {
            (ModelParams::Lr(m), ModelInput::Sparse(x)) => Ok(m.predict_proba(x)),
            (ModelParams::Cnn(m), ModelInput::Sequence(s)) => m.predict_proba(s),
            _ => Err(Error::InvalidInput(format!(
                "{} model given the wrong kind of features",
                self.model.kind()
            ))),
        }
    }
}
