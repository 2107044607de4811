//! Character-trigram language identification with rank-order ("out-of-place")
//! distance against per-language profiles.

use std::collections::HashMap;
use std::sync::OnceLock;

/// Code returned when a text is too short to classify.
pub const UNDETERMINED: &str = "und";

/// Texts with fewer characters than this are not classified.
pub const MIN_CHARS: usize = 20;

const PROFILE_SIZE: usize = 400;

const BUNDLED: &[(&str, &str)] = &[
    ("de", include_str!("../../resources/langid/de.txt")),
    ("en", include_str!("../../resources/langid/en.txt")),
    ("es", include_str!("../../resources/langid/es.txt")),
    ("fr", include_str!("../../resources/langid/fr.txt")),
    ("it", include_str!("../../resources/langid/it.txt")),
    ("nl", include_str!("../../resources/langid/nl.txt")),
    ("pt", include_str!("../../resources/langid/pt.txt")),
];

/// Ranked trigram list, most frequent first.
#[derive(Debug, Clone)]
struct Profile {
    ranks: HashMap<String, usize>,
}

fn ranked_trigrams(text: &str, limit: usize) -> Vec<String> {
    let mut normalized = String::with_capacity(text.len() + 2);
    normalized.push(' ');
    let mut last_space = true;
    for ch in text.chars().flat_map(char::to_lowercase) {
        if ch.is_alphabetic() {
            normalized.push(ch);
            last_space = false;
        } else if !last_space {
            normalized.push(' ');
            last_space = true;
        }
    }
    if !last_space {
        normalized.push(' ');
    }

    let chars: Vec<char> = normalized.chars().collect();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for w in chars.windows(3) {
        if w[1] == ' ' {
            continue;
        }
        *counts.entry(w.iter().collect()).or_insert(0) += 1;
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(limit);
    ranked.into_iter().map(|(t, _)| t).collect()
}

impl Profile {
    fn from_text(text: &str) -> Self {
        let ranks = ranked_trigrams(text, PROFILE_SIZE)
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        Profile { ranks }
    }

    fn out_of_place(&self, doc: &[String]) -> usize {
        doc.iter()
            .enumerate()
            .map(|(i, t)| match self.ranks.get(t) {
                Some(&r) => r.abs_diff(i),
                None => PROFILE_SIZE,
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct LanguageIdentifier {
    profiles: Vec<(String, Profile)>,
}

impl LanguageIdentifier {
    /// Builds profiles from `(code, training text)` pairs.
    pub fn from_samples<'a, I>(samples: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut profiles: Vec<(String, Profile)> = samples
            .into_iter()
            .map(|(code, text)| (code.to_string(), Profile::from_text(text)))
            .collect();
        profiles.sort_by(|a, b| a.0.cmp(&b.0));
        LanguageIdentifier { profiles }
    }

    pub fn bundled() -> Self {
        Self::from_samples(BUNDLED.iter().copied())
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.profiles.iter().map(|(c, _)| c.as_str())
    }

    /// Returns the closest language and a similarity in `[0, 1]`:
    /// one minus the winning distance over the largest possible distance,
    /// counting only trigrams known to at least one profile.
    pub fn detect(&self, text: &str) -> (&str, f64) {
        if text.chars().count() < MIN_CHARS || self.profiles.is_empty() {
            return (UNDETERMINED, 0.0);
        }
        // Trigrams absent from every profile carry no evidence.
        let doc: Vec<String> = ranked_trigrams(text, PROFILE_SIZE)
            .into_iter()
            .filter(|t| self.profiles.iter().any(|(_, p)| p.ranks.contains_key(t)))
            .collect();
        if doc.is_empty() {
            return (UNDETERMINED, 0.0);
        }
        let worst = doc.len() * PROFILE_SIZE;
        // Ties go to the alphabetically first code.
        let (code, dist) = self
            .profiles
            .iter()
            .map(|(code, p)| (code.as_str(), p.out_of_place(&doc)))
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("non-empty profile set");
        (code, 1.0 - dist as f64 / worst as f64)
    }
}

fn bundled_identifier() -> &'static LanguageIdentifier {
    static ID: OnceLock<LanguageIdentifier> = OnceLock::new();
    ID.get_or_init(LanguageIdentifier::bundled)
}

/// Classifies `text` with the bundled profiles.
pub fn detect_language(text: &str) -> (&'static str, f64) {
    bundled_identifier().detect(text)
}
