//! Review and business ingestion (Yelp JSON Lines schema) and per-author grouping.

mod langid;

pub use langid::{detect_language, LanguageIdentifier, UNDETERMINED};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Minimum number of priced reviews for an author to be profiled.
pub const MIN_PROFILE_REVIEWS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    pub user_id: String,
    pub business_id: String,
    pub text: String,
    /// Zero-padded file position; sorts in input order.
    pub order_key: String,
    /// Language code shipped with the record, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Business<'a> {
    pub business_id: &'a str,
    pub price_range: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorProfile {
    pub user_id: String,
    pub reviews: Vec<Review>,
    pub label_counts: BTreeMap<u8, usize>,
}

impl AuthorProfile {
    pub fn review_count(&self) -> usize {
        self.reviews.len()
    }
}

/// Streaming reader over a review JSONL file.
///
/// Lines that are not JSON objects, or lack one of the required string keys,
/// are skipped and counted. Blank lines are ignored without being counted.
pub struct ReviewReader<R> {
    lines: std::io::Lines<R>,
    position: usize,
    skipped: usize,
    path: std::path::PathBuf,
}

impl<R: BufRead> ReviewReader<R> {
    pub fn new(reader: R) -> Self {
        ReviewReader {
            lines: reader.lines(),
            position: 0,
            skipped: 0,
            path: "<reader>".into(),
        }
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

impl<R: BufRead> Iterator for ReviewReader<R> {
    type Item = Result<Review>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            };
            let position = self.position;
            self.position += 1;
            if line.trim().is_empty() {
                continue;
            }
            match parse_review_line(&line, position) {
                Some(review) => return Some(Ok(review)),
                None => self.skipped += 1,
            }
        }
    }
}

fn parse_review_line(line: &str, position: usize) -> Option<Review> {
    let value: Value = serde_json::from_str(line).ok()?;
    let obj = value.as_object()?;
    let field = |key: &str| -> Option<String> {
        let s = obj.get(key)?.as_str()?;
        (!s.trim().is_empty()).then(|| s.to_string())
    };
    let lang = obj
        .get("lang")
        .or_else(|| obj.get("language"))
        .and_then(Value::as_str)
        .map(str::to_string);
    Some(Review {
        review_id: field("review_id")?,
        user_id: field("user_id")?,
        business_id: field("business_id")?,
        text: field("text")?,
        order_key: format!("{position:012}"),
        lang,
    })
}

/// Opens a review file. Failing to open it is fatal; bad lines are not.
pub fn load_reviews(path: &Path) -> Result<ReviewReader<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ReviewReader::new(BufReader::new(file));
    reader.path = path.to_path_buf();
    Ok(reader)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusinessPrices {
    pub prices: BTreeMap<String, u8>,
    /// Lines without a usable price in 1..=4 (or unparseable lines).
    pub excluded: usize,
    /// Repeated business ids whose price disagrees with the first one seen.
    pub conflicts: usize,
}

impl BusinessPrices {
    pub fn get(&self, business_id: &str) -> Option<Business<'_>> {
        self.prices
            .get_key_value(business_id)
            .map(|(id, &price_range)| Business {
                business_id: id,
                price_range,
            })
    }
}

fn parse_price(value: &Value) -> Option<u8> {
    let price = match value {
        Value::String(s) => s.trim().parse::<u8>().ok()?,
        Value::Number(n) => u8::try_from(n.as_u64()?).ok()?,
        _ => return None,
    };
    (1..=4).contains(&price).then_some(price)
}

pub fn read_businesses<R: BufRead>(reader: R, path: &Path) -> Result<BusinessPrices> {
    let mut out = BusinessPrices::default();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<Value>(&line).ok().and_then(|v| {
            let id = v.get("business_id")?.as_str()?.to_string();
            let price = v
                .get("attributes")
                .and_then(|a| a.get("RestaurantsPriceRange2"))
                .and_then(parse_price);
            Some((id, price))
        });
        match parsed {
            Some((id, Some(price))) => match out.prices.get(&id) {
                Some(&existing) if existing != price => out.conflicts += 1,
                Some(_) => {}
                None => {
                    out.prices.insert(id, price);
                }
            },
            _ => out.excluded += 1,
        }
    }
    Ok(out)
}

pub fn load_businesses(path: &Path) -> Result<BusinessPrices> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_businesses(BufReader::new(file), path)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grouping {
    pub profiles: Vec<AuthorProfile>,
    /// Reviews dropped because their business has no known price.
    pub unpriced: usize,
    /// Authors dropped for having fewer than two priced reviews.
    pub dropped_authors: usize,
}

/// Groups priced reviews by author. Output is sorted by `user_id` and each
/// author's reviews by `(order_key, review_id)`, so input order does not matter.
pub fn group_by_author<I>(reviews: I, prices: &BusinessPrices) -> Grouping
where
    I: IntoIterator<Item = Review>,
{
    let mut by_user: BTreeMap<String, Vec<Review>> = BTreeMap::new();
    let mut unpriced = 0;
    for review in reviews {
        if prices.get(&review.business_id).is_none() {
            unpriced += 1;
            continue;
        }
        by_user.entry(review.user_id.clone()).or_default().push(review);
    }

    let mut dropped_authors = 0;
    let mut profiles = Vec::with_capacity(by_user.len());
    for (user_id, mut reviews) in by_user {
        if reviews.len() < MIN_PROFILE_REVIEWS {
            dropped_authors += 1;
            continue;
        }
        reviews.sort_by(|a, b| {
            a.order_key
                .cmp(&b.order_key)
                .then_with(|| a.review_id.cmp(&b.review_id))
        });
        let mut label_counts = BTreeMap::new();
        for r in &reviews {
            let price = prices.prices[&r.business_id];
            *label_counts.entry(price).or_insert(0) += 1;
        }
        profiles.push(AuthorProfile {
            user_id,
            reviews,
            label_counts,
        });
    }
    Grouping {
        profiles,
        unpriced,
        dropped_authors,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LanguageFilter {
    /// Run the built-in trigram identifier.
    #[default]
    Detect,
    /// Trust the record's `lang` field; records without one are kept.
    TrustField,
    /// Keep everything.
    Off,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageTally {
    pub kept: usize,
    pub non_english: usize,
    pub undetermined: usize,
}

/// Keeps English reviews. Texts too short to identify are kept.
pub fn filter_english<I>(
    reviews: I,
    mode: LanguageFilter,
    identifier: &LanguageIdentifier,
) -> (Vec<Review>, LanguageTally)
where
    I: IntoIterator<Item = Review>,
{
    let mut tally = LanguageTally::default();
    let mut kept = Vec::new();
    for review in reviews {
        let lang = match mode {
            LanguageFilter::Off => None,
            LanguageFilter::TrustField => review.lang.clone(),
            LanguageFilter::Detect => Some(identifier.detect(&review.text).0.to_string()),
        };
        match lang.as_deref() {
            Some(UNDETERMINED) => tally.undetermined += 1,
            Some(code) if code != "en" => {
                tally.non_english += 1;
                continue;
            }
            _ => {}
        }
        tally.kept += 1;
        kept.push(review);
    }
    (kept, tally)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub reviews_read: usize,
    pub reviews_skipped: usize,
    pub language: LanguageTally,
    pub businesses_priced: usize,
    pub businesses_excluded: usize,
    pub price_conflicts: usize,
    pub unpriced_reviews: usize,
    pub authors: usize,
    pub authors_dropped: usize,
}
