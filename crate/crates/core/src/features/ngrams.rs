use std::collections::{BTreeMap, BTreeSet};

/// Multiset of n-gram symbols.
pub type NgramCounts = BTreeMap<String, u32>;

/// Word n-grams over `tokens` (prefixed `w:`, joined by a space) plus
/// character n-grams over `text` (prefixed `c:`, whitespace included).
pub fn extract_ngrams<S: AsRef<str>>(
    tokens: &[S],
    text: &str,
    word_ns: &BTreeSet<usize>,
    char_ns: &BTreeSet<usize>,
) -> NgramCounts {
    let mut out = NgramCounts::new();
    add_word_ngrams(&mut out, tokens, word_ns);
    if !char_ns.is_empty() {
        let chars: Vec<char> = text.chars().collect();
        for &n in char_ns {
            if n == 0 {
                continue;
            }
            for w in chars.windows(n) {
                let mut key = String::with_capacity(2 + n);
                key.push_str("c:");
                key.extend(w);
                *out.entry(key).or_insert(0) += 1;
            }
        }
    }
    out
}

pub fn add_word_ngrams<S: AsRef<str>>(out: &mut NgramCounts, tokens: &[S], word_ns: &BTreeSet<usize>) {
    for &n in word_ns {
        if n == 0 {
            continue;
        }
        for w in tokens.windows(n) {
            let mut key = String::from("w:");
            for (i, t) in w.iter().enumerate() {
                if i > 0 {
                    key.push(' ');
                }
                key.push_str(t.as_ref());
            }
            *out.entry(key).or_insert(0) += 1;
        }
    }
}
