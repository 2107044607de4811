//! Readability battery (ARI, Coleman-Liau, Dale-Chall, Flesch-Kincaid,
//! Flesch reading ease, Gunning Fog, Linsear Write, LIX) and a per-class
//! comparison with Kruskal-Wallis tests.

mod formulas;
mod kruskal;
mod stats;

pub use formulas::{compute_readability, ReadabilityScores};
pub use kruskal::{chi2_critical, kruskal_wallis, significance, KruskalResult, Significance};
pub use stats::{count_sentences, count_syllables, text_stats, text_stats_with, words, EasyWords, TextStats};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::labeling::{LabeledDocument, SilverLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReadability {
    pub class_id: u8,
    pub documents: usize,
    pub means: ReadabilityScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityReport {
    /// One row per class that had at least one scoreable document.
    pub classes: Vec<ClassReadability>,
    /// Classes with documents but none scoreable, or with no documents.
    pub missing: Vec<u8>,
    /// Kruskal-Wallis over the per-document scores, keyed by metric.
    pub tests: BTreeMap<String, KruskalResult>,
    /// Metrics whose class means strictly increase from `$` to `$$$$`.
    pub increasing: Vec<String>,
    /// Metrics whose class means strictly decrease.
    pub decreasing: Vec<String>,
}

/// Per-document scores grouped by class. Documents with no words are skipped.
pub fn scores_by_class(docs: &[LabeledDocument], easy: &EasyWords) -> BTreeMap<SilverLabel, Vec<ReadabilityScores>> {
    let mut out: BTreeMap<SilverLabel, Vec<ReadabilityScores>> = BTreeMap::new();
    for d in docs {
        if let Ok(s) = compute_readability(&text_stats_with(&d.text, easy)) {
            out.entry(d.label).or_default().push(s);
        }
    }
    out
}

fn mean_scores(scores: &[ReadabilityScores]) -> ReadabilityScores {
    let mut sum = [0.0; 8];
    for s in scores {
        for (acc, v) in sum.iter_mut().zip(s.values()) {
            *acc += v;
        }
    }
    ReadabilityScores::from_values(sum.map(|v| v / scores.len() as f64))
}

/// Class means of every metric.
pub fn readability_by_class(docs: &[LabeledDocument], easy: &EasyWords) -> ReadabilityReport {
    let by_class = scores_by_class(docs, easy);
    let classes: Vec<ClassReadability> = by_class
        .iter()
        .map(|(label, scores)| ClassReadability {
            class_id: label.class_id(),
            documents: scores.len(),
            means: mean_scores(scores),
        })
        .collect();
    let missing = SilverLabel::ALL
        .iter()
        .filter(|l| !by_class.contains_key(l))
        .map(|l| l.class_id())
        .collect();

    let mut tests = BTreeMap::new();
    let mut increasing = Vec::new();
    let mut decreasing = Vec::new();
    for (m, name) in ReadabilityScores::METRICS.iter().enumerate() {
        let groups: Vec<Vec<f64>> = by_class
            .values()
            .map(|scores| scores.iter().map(|s| s.values()[m]).collect())
            .collect();
        if let Ok(result) = kruskal_wallis(&groups) {
            tests.insert(name.to_string(), result);
        }
        let means: Vec<f64> = classes.iter().map(|c| c.means.values()[m]).collect();
        if means.len() > 1 {
            if means.windows(2).all(|w| w[0] < w[1]) {
                increasing.push(name.to_string());
            } else if means.windows(2).all(|w| w[0] > w[1]) {
                decreasing.push(name.to_string());
            }
        }
    }

    ReadabilityReport {
        classes,
        missing,
        tests,
        increasing,
        decreasing,
    }
}
