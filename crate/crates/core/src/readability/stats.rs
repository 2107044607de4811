use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Surface counts every readability formula is built from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextStats {
    pub sentences: usize,
    pub words: usize,
    /// Alphanumeric characters inside words.
    pub characters: usize,
    pub letters: usize,
    pub syllables: usize,
    /// Words of three or more syllables.
    pub complex_words: usize,
    /// Words of at most two syllables.
    pub easy_words: usize,
    /// Words of seven or more letters.
    pub long_words: usize,
    /// Words with letters that are not on the easy-word list.
    pub difficult_words: usize,
}

/// Case-insensitive easy-word list for the Dale-Chall score.
#[derive(Debug, Clone, Default)]
pub struct EasyWords(HashSet<String>);

impl EasyWords {
    /// One word per line; blank lines and surrounding whitespace are ignored.
    pub fn parse(list: &str) -> Self {
        EasyWords(
            list.lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn bundled() -> &'static EasyWords {
        static LIST: OnceLock<EasyWords> = OnceLock::new();
        LIST.get_or_init(|| EasyWords::parse(include_str!("../../resources/dale_chall_easy_words.txt")))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '\'' | '\u{2019}' | '-')
}

/// Maximal runs of alphanumerics, apostrophes and hyphens, with
/// apostrophes/hyphens trimmed from both ends.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !is_word_char(c))
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Sentences are separated by a run of `.`, `!` or `?` followed by whitespace
/// or end of text. Only segments containing a word count.
pub fn count_sentences(text: &str) -> usize {
    let chars: Vec<char> = text.chars().collect();
    let mut count = 0;
    let mut has_word = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            has_word = true;
            i += 1;
        } else if is_terminator(c) {
            let mut j = i;
            while j < chars.len() && is_terminator(chars[j]) {
                j += 1;
            }
            if j == chars.len() || chars[j].is_whitespace() {
                if has_word {
                    count += 1;
                }
                has_word = false;
            }
            i = j;
        } else {
            i += 1;
        }
    }
    if has_word {
        count += 1;
    }
    count
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group syllable heuristic: count maximal runs of `aeiouy`, drop a
/// trailing silent `e` unless the word ends in consonant + `le`; at least 1.
pub fn count_syllables(word: &str) -> usize {
    let lower: Vec<char> = word.to_lowercase().chars().collect();
    let mut groups = 0usize;
    let mut prev_vowel = false;
    for &c in &lower {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = lower.len();
    if n >= 1 && lower[n - 1] == 'e' {
        let consonant_le = n >= 3 && lower[n - 2] == 'l' && lower[n - 3].is_alphabetic() && !is_vowel(lower[n - 3]);
        if !consonant_le {
            groups = groups.saturating_sub(1);
        }
    }
    groups.max(1)
}

pub fn text_stats_with(text: &str, easy: &EasyWords) -> TextStats {
    let mut stats = TextStats::default();
    for word in words(text) {
        stats.words += 1;
        let letters = word.chars().filter(|c| c.is_alphabetic()).count();
        stats.letters += letters;
        stats.characters += word.chars().filter(|c| c.is_alphanumeric()).count();
        let syl = count_syllables(word);
        stats.syllables += syl;
        if syl >= 3 {
            stats.complex_words += 1;
        } else {
            stats.easy_words += 1;
        }
        if letters >= 7 {
            stats.long_words += 1;
        }
        if letters > 0 && !easy.contains(word) {
            stats.difficult_words += 1;
        }
    }
    if stats.words > 0 {
        stats.sentences = count_sentences(text).max(1);
    }
    stats
}

/// Counts with the bundled easy-word list.
pub fn text_stats(text: &str) -> TextStats {
    text_stats_with(text, EasyWords::bundled())
}
