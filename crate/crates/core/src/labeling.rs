//! Silver labels from restaurant price ranges: mode labeling, label-entropy
//! filtering, the minimum-review floor and class balancing.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::AuthorProfile;
use crate::error::{Error, Result};

pub const NUM_CLASSES: usize = 4;

/// Default minimum number of reviews an author needs after entropy filtering.
pub const DEFAULT_MIN_REVIEWS: usize = 9;

/// A price class in 1..=4, rendered as `$`..`$$$$`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct SilverLabel(u8);

impl SilverLabel {
    pub const ALL: [SilverLabel; NUM_CLASSES] = [SilverLabel(1), SilverLabel(2), SilverLabel(3), SilverLabel(4)];

    pub fn new(class_id: u8) -> Result<Self> {
        if (1..=4).contains(&class_id) {
            Ok(SilverLabel(class_id))
        } else {
            Err(Error::InvalidInput(format!("class {class_id} outside 1..=4")))
        }
    }

    pub fn class_id(self) -> u8 {
        self.0
    }

    /// Zero-based index, for arrays of length [`NUM_CLASSES`].
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < NUM_CLASSES, "class index {index}");
        SilverLabel(index as u8 + 1)
    }
}

impl TryFrom<u8> for SilverLabel {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        SilverLabel::new(v)
    }
}

impl From<SilverLabel> for u8 {
    fn from(l: SilverLabel) -> u8 {
        l.0
    }
}

impl fmt::Display for SilverLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.0 {
            f.write_str("$")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledAuthor {
    pub user_id: String,
    #[serde(rename = "class_id")]
    pub label: SilverLabel,
    #[serde(rename = "entropy")]
    pub entropy_nats: f64,
    pub review_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub user_id: String,
    #[serde(rename = "class_id")]
    pub label: SilverLabel,
    pub text: String,
}

/// The modal class. A tie for the maximum is an error.
pub fn assign_label(counts: &BTreeMap<u8, usize>) -> Result<SilverLabel> {
    let max = counts.values().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(Error::InvalidInput("empty label counts".into()));
    }
    let modal: Vec<u8> = counts.iter().filter(|(_, &n)| n == max).map(|(&c, _)| c).collect();
    match modal.as_slice() {
        [single] => SilverLabel::new(*single),
        _ => Err(Error::Tie(modal)),
    }
}

/// Shannon entropy in nats of the normalized counts.
pub fn label_entropy(counts: &BTreeMap<u8, usize>) -> f64 {
    let total: usize = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .values()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let p = n as f64 / total;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Labels each profile, excluding authors whose mode is tied.
pub fn label_profiles(profiles: &[AuthorProfile]) -> (Vec<LabeledAuthor>, Vec<String>) {
    let mut labeled = Vec::with_capacity(profiles.len());
    let mut tied = Vec::new();
    for p in profiles {
        match assign_label(&p.label_counts) {
            Ok(label) => labeled.push(LabeledAuthor {
                user_id: p.user_id.clone(),
                label,
                entropy_nats: label_entropy(&p.label_counts),
                review_count: p.review_count(),
            }),
            Err(_) => tied.push(p.user_id.clone()),
        }
    }
    (labeled, tied)
}

/// Mean entropy of the pool, or `None` for an empty pool.
pub fn mean_entropy(authors: &[LabeledAuthor]) -> Option<f64> {
    if authors.is_empty() {
        return None;
    }
    Some(authors.iter().map(|a| a.entropy_nats).sum::<f64>() / authors.len() as f64)
}

/// Keeps authors at or below the pool's mean entropy that have at least
/// `min_reviews` reviews. The mean is taken over the whole input.
pub fn filter_authors(authors: &[LabeledAuthor], min_reviews: usize) -> Vec<LabeledAuthor> {
    let Some(threshold) = mean_entropy(authors) else {
        return Vec::new();
    };
    authors
        .iter()
        .filter(|a| a.entropy_nats <= threshold && a.review_count >= min_reviews)
        .cloned()
        .collect()
}

pub fn class_sizes(authors: &[LabeledAuthor]) -> [usize; NUM_CLASSES] {
    let mut sizes = [0; NUM_CLASSES];
    for a in authors {
        sizes[a.label.index()] += 1;
    }
    sizes
}

/// Downsamples every class to the size of the smallest one.
///
/// Within a class, authors are sorted by `user_id` and a seeded uniform
/// sample without replacement is drawn. The output is sorted by
/// `(class, user_id)`.
pub fn balance_downsample(authors: &[LabeledAuthor], seed: u64) -> Result<Vec<LabeledAuthor>> {
    let mut by_class: BTreeMap<SilverLabel, Vec<&LabeledAuthor>> = BTreeMap::new();
    for a in authors {
        by_class.entry(a.label).or_default().push(a);
    }
    for class in SilverLabel::ALL {
        if !by_class.contains_key(&class) {
            return Err(Error::Balance(class.class_id()));
        }
    }
    let n = by_class.values().map(Vec::len).min().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n * NUM_CLASSES);
    for (_, mut members) in by_class {
        members.sort_by(|a, b| a.user_id.cmp(&b.user_id));
        let mut picked = sample(&mut rng, members.len(), n).into_vec();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|i| members[i].clone()));
    }
    Ok(out)
}

/// Concatenates each author's reviews (already in `order_key` order) with newlines.
pub fn build_documents(
    authors: &[LabeledAuthor],
    profiles: &BTreeMap<String, AuthorProfile>,
) -> Result<Vec<LabeledDocument>> {
    authors
        .iter()
        .map(|a| {
            let profile = profiles
                .get(&a.user_id)
                .ok_or_else(|| Error::Consistency(format!("no profile for labeled author {}", a.user_id)))?;
            let mut reviews: Vec<_> = profile.reviews.iter().collect();
            reviews.sort_by(|x, y| {
                x.order_key
                    .cmp(&y.order_key)
                    .then_with(|| x.review_id.cmp(&y.review_id))
            });
            let text = reviews.iter().map(|r| r.text.as_str()).collect::<Vec<_>>().join("\n");
            Ok(LabeledDocument {
                user_id: a.user_id.clone(),
                label: a.label,
                text,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingSummary {
    pub profiled_authors: usize,
    pub tied_authors: usize,
    pub mean_entropy: Option<f64>,
    pub after_filter: [usize; NUM_CLASSES],
    pub per_class: usize,
    pub min_reviews: usize,
    pub seed: u64,
}

/// Labels, filters and balances profiles in the fixed order:
/// mode labeling, entropy-mean threshold plus review floor, downsampling.
pub fn label_and_balance(
    profiles: &[AuthorProfile],
    min_reviews: usize,
    seed: u64,
) -> Result<(Vec<LabeledAuthor>, LabelingSummary)> {
    let (labeled, tied) = label_profiles(profiles);
    let mean = mean_entropy(&labeled);
    let filtered = filter_authors(&labeled, min_reviews);
    let after_filter = class_sizes(&filtered);
    let balanced = balance_downsample(&filtered, seed)?;
    let summary = LabelingSummary {
        profiled_authors: profiles.len(),
        tied_authors: tied.len(),
        mean_entropy: mean,
        after_filter,
        per_class: balanced.len() / NUM_CLASSES,
        min_reviews,
        seed,
    };
    Ok((balanced, summary))
}
