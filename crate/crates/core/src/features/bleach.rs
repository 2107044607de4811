//! Bleached token representation: surface shape, zero-padded length,
//! alphanumeric flag, consonant/vowel pattern and training frequency,
//! joined with `_`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// How the frequency field is rendered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyField {
    /// The raw training-corpus count.
    #[default]
    Raw,
    /// `0` for unseen tokens, otherwise `e<floor(log10(count))>`.
    Log10Bucket,
}

impl FrequencyField {
    pub fn render(self, freq: u64) -> String {
        match self {
            FrequencyField::Raw => freq.to_string(),
            FrequencyField::Log10Bucket if freq == 0 => "0".to_string(),
            FrequencyField::Log10Bucket => format!("e{}", freq.ilog10()),
        }
    }
}

fn shape(token: &str) -> String {
    token
        .chars()
        .map(|c| match c {
            c if c.is_alphabetic() && c.is_uppercase() => 'X',
            c if c.is_alphabetic() => 'x',
            c => c,
        })
        .collect()
}

fn cv_pattern(token: &str) -> String {
    token
        .chars()
        .map(|c| match c.to_ascii_lowercase() {
            'a' | 'e' | 'i' | 'o' | 'u' => 'V',
            _ if c.is_alphabetic() => 'C',
            _ => c,
        })
        .collect()
}

/// Bleaches one token given its training-corpus frequency (0 when unseen).
pub fn bleach_token(token: &str, freq: u64) -> String {
    bleach_token_with(token, freq, FrequencyField::Raw)
}

pub fn bleach_token_with(token: &str, freq: u64, field: FrequencyField) -> String {
    let length = token.chars().count();
    let alnum = if !token.is_empty() && token.chars().all(char::is_alphanumeric) {
        "True"
    } else {
        "False"
    };
    format!(
        "{}_{:02}_{}_{}_{}",
        shape(token),
        length,
        alnum,
        cv_pattern(token),
        field.render(freq)
    )
}

/// Token counts over the training split.
#[derive(Debug, Clone, Default)]
pub struct TokenFrequencies(HashMap<String, u64>);

impl TokenFrequencies {
    pub fn count<'a, I, T>(tokens: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str> + 'a,
    {
        let mut map = HashMap::new();
        for t in tokens {
            *map.entry(t.as_ref().to_string()).or_insert(0) += 1;
        }
        TokenFrequencies(map)
    }

    pub fn get(&self, token: &str) -> u64 {
        self.0.get(token).copied().unwrap_or(0)
    }
}
