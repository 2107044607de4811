//! Train/test splitting, scoring, run averaging and inspection of trained
//! models.

mod svg;
mod top;

pub use svg::confusion_svg;
pub use top::{top_features, top_features_tsv, FeatureFilter, Ranking, TopFeature};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::Representation;
use crate::labeling::{LabeledDocument, SilverLabel, NUM_CLASSES};
use crate::models::ModelKind;

/// Author ids on each side of a split, train and test each sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train_fraction: f64,
    pub seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl Split {
    /// SHA-256 over the sorted test ids, one per line.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for id in &self.test {
            h.update(id.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// Per class: order documents by author id, shuffle with the seeded
/// generator, then send `floor(fraction * n)` to train and the rest to test.
pub fn stratified_split(docs: &[LabeledDocument], train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in SilverLabel::ALL {
        let mut ids: Vec<&str> = docs
            .iter()
            .filter(|d| d.label == label)
            .map(|d| d.user_id.as_str())
            .collect();
        if ids.len() < 2 {
            return Err(Error::ClassTooSmall {
                class: label.class_id(),
                count: ids.len(),
                needed: 2,
            });
        }
        ids.sort_unstable();
        ids.shuffle(&mut rng);
        let n_train = (train_fraction * ids.len() as f64 + 1e-9).floor() as usize;
        train.extend(ids[..n_train].iter().map(|s| s.to_string()));
        test.extend(ids[n_train..].iter().map(|s| s.to_string()));
    }
    train.sort();
    test.sort();
    Ok(Split {
        train_fraction,
        seed,
        train,
        test,
    })
}

/// Rows are gold classes, columns predictions, both in class order.
pub type ConfusionMatrix = [[u64; NUM_CLASSES]; NUM_CLASSES];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub class_id: u8,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: Option<ModelKind>,
    pub representation: Option<Representation>,
    pub per_class: Vec<ClassScores>,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
    pub seeds: Vec<u64>,
}

impl EvalReport {
    pub fn tagged(mut self, model: ModelKind, representation: Representation, seed: u64) -> Self {
        self.model = Some(model);
        self.representation = Some(representation);
        self.seeds = vec![seed];
        self
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores class-index predictions against gold. Undefined precision,
/// recall or F1 (zero denominator) count as 0.
pub fn evaluate(preds: &[usize], gold: &[usize]) -> Result<EvalReport> {
    if preds.len() != gold.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions for {} gold labels",
            preds.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::InvalidInput("nothing to evaluate".into()));
    }
    let mut confusion = [[0u64; NUM_CLASSES]; NUM_CLASSES];
    for (&p, &g) in preds.iter().zip(gold) {
        if p >= NUM_CLASSES || g >= NUM_CLASSES {
            return Err(Error::InvalidInput(format!("class index out of range ({g}, {p})")));
        }
        confusion[g][p] += 1;
    }
    Ok(report_from_confusion(confusion))
}

fn report_from_confusion(confusion: ConfusionMatrix) -> EvalReport {
    let total: u64 = confusion.iter().flatten().sum();
    let per_class: Vec<ClassScores> = (0..NUM_CLASSES)
        .map(|c| {
            let tp = confusion[c][c];
            let support: u64 = confusion[c].iter().sum();
            let predicted: u64 = confusion.iter().map(|row| row[c]).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassScores {
                class_id: SilverLabel::from_index(c).class_id(),
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect();
    let correct: u64 = (0..NUM_CLASSES).map(|c| confusion[c][c]).sum();
    let weighted_f1 = per_class.iter().map(|s| s.f1 * s.support as f64).sum::<f64>() / total as f64;
    let macro_f1 = per_class.iter().map(|s| s.f1).sum::<f64>() / NUM_CLASSES as f64;
    EvalReport {
        model: None,
        representation: None,
        per_class,
        accuracy: ratio(correct, total),
        weighted_f1,
        macro_f1,
        confusion,
        seeds: Vec::new(),
    }
}

/// Means every score over runs, sums the confusion matrices and lists all
/// run seeds. Supports are taken from the first run.
pub fn average_runs(reports: &[EvalReport]) -> Result<EvalReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::InvalidInput("no runs to average".into()))?;
    if reports
        .iter()
        .any(|r| r.model != first.model || r.representation != first.representation)
    {
        return Err(Error::Consistency("runs mix models or representations".into()));
    }
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let per_class = (0..NUM_CLASSES)
        .map(|c| ClassScores {
            class_id: first.per_class[c].class_id,
            precision: mean(&|r| r.per_class[c].precision),
            recall: mean(&|r| r.per_class[c].recall),
            f1: mean(&|r| r.per_class[c].f1),
            support: first.per_class[c].support,
        })
        .collect();
    let mut confusion = [[0u64; NUM_CLASSES]; NUM_CLASSES];
    for r in reports {
        for (row, src) in confusion.iter_mut().zip(&r.confusion) {
            for (a, b) in row.iter_mut().zip(src) {
                *a += b;
            }
        }
    }
    Ok(EvalReport {
        model: first.model,
        representation: first.representation,
        per_class,
        accuracy: mean(&|r| r.accuracy),
        weighted_f1: mean(&|r| r.weighted_f1),
        macro_f1: mean(&|r| r.macro_f1),
        confusion,
        seeds: reports.iter().flat_map(|r| r.seeds.iter().copied()).collect(),
    })
}
