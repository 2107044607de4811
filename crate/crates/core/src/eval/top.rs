use serde::{Deserialize, Serialize};

use crate::features::{Vocabulary, UNK};
use crate::labeling::{SilverLabel, NUM_CLASSES};
use crate::models::LrModel;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureFilter {
    #[default]
    All,
    /// Only single-word lexical features (`w:` symbols without a space).
    WordUnigrams,
}

impl FeatureFilter {
    fn keep(self, symbol: &str) -> bool {
        match self {
            FeatureFilter::All => true,
            FeatureFilter::WordUnigrams => symbol.strip_prefix("w:").is_some_and(|w| !w.contains(' ')),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ranking {
    /// Largest weight first.
    #[default]
    Positive,
    /// Largest absolute weight first.
    Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopFeature {
    pub symbol: String,
    pub weight: f64,
}

/// The `k` highest-ranked symbols of each class's weight row, ties broken
/// by symbol order. UNK is never listed. Asking for more symbols than
/// survive the filter returns them all.
pub fn top_features(
    model: &LrModel,
    vocab: &Vocabulary,
    k: usize,
    filter: FeatureFilter,
    ranking: Ranking,
) -> Vec<Vec<TopFeature>> {
    let candidates: Vec<(u32, &str)> = vocab
        .symbols()
        .iter()
        .enumerate()
        .map(|(id, s)| (id as u32, s.as_str()))
        .filter(|&(id, s)| id != UNK && (id as usize) < model.n_features && filter.keep(s))
        .collect();
    if k > candidates.len() {
        log::warn!("requested {k} top features but only {} are available", candidates.len());
    }
    (0..NUM_CLASSES)
        .map(|c| {
            let row = model.class_weights(c);
            let key = |w: f64| match ranking {
                Ranking::Positive => w,
                Ranking::Magnitude => w.abs(),
            };
            let mut ranked: Vec<(f64, &str, f64)> = candidates
                .iter()
                .map(|&(id, s)| {
                    let w = row[id as usize];
                    (key(w), s, w)
                })
                .collect();
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            ranked
                .into_iter()
                .take(k)
                .map(|(_, s, w)| TopFeature {
                    symbol: s.to_string(),
                    weight: w,
                })
                .collect()
        })
        .collect()
}

/// `class\trank\tsymbol\tweight` rows under a header line.
pub fn top_features_tsv(per_class: &[Vec<TopFeature>]) -> String {
    let mut out = String::from("class\trank\tsymbol\tweight\n");
    for (c, feats) in per_class.iter().enumerate() {
        for (rank, f) in feats.iter().enumerate() {
            let symbol = f.symbol.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n");
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.6}\n",
                SilverLabel::from_index(c),
                rank + 1,
                symbol,
                f.weight
            ));
        }
    }
    out
}
