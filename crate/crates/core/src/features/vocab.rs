use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const UNK: u32 = 0;
pub const UNK_SYMBOL: &str = "<UNK>";

/// Symbol ↔ id bijection. Id 0 is reserved for unknown symbols; the rest are
/// ordered by descending corpus frequency, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: Vec<String>,
    freqs: Vec<u64>,
    ids: HashMap<String, u32>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::from_ranked(Vec::new())
    }
}

impl Vocabulary {
    fn from_ranked(ranked: Vec<(String, u64)>) -> Self {
        let mut symbols = Vec::with_capacity(ranked.len() + 1);
        let mut freqs = Vec::with_capacity(ranked.len() + 1);
        symbols.push(UNK_SYMBOL.to_string());
        freqs.push(0);
        for (s, f) in ranked {
            symbols.push(s);
            freqs.push(f);
        }
        let ids = symbols
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Vocabulary { symbols, freqs, ids }
    }

    /// Builds from training documents given as symbol multisets. A symbol is
    /// kept when it occurs in at least `min_df` documents.
    pub fn from_counts<'a, I>(docs: I, min_df: usize) -> Self
    where
        I: IntoIterator<Item = &'a BTreeMap<String, u32>>,
    {
        let mut freq: HashMap<&'a str, (u64, usize)> = HashMap::new();
        for doc in docs {
            for (sym, &n) in doc {
                if n == 0 {
                    continue;
                }
                let e = freq.entry(sym.as_str()).or_insert((0, 0));
                e.0 += u64::from(n);
                e.1 += 1;
            }
        }
        let mut ranked: Vec<(String, u64)> = freq
            .into_iter()
            .filter(|(_, (_, df))| *df >= min_df.max(1))
            .map(|(s, (f, _))| (s.to_string(), f))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self::from_ranked(ranked)
    }

    /// Builds from training documents given as symbol sequences.
    pub fn from_sequences<I, D, S>(docs: I, min_df: usize) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let bags: Vec<BTreeMap<String, u32>> = docs
            .into_iter()
            .map(|d| {
                let mut bag = BTreeMap::new();
                for s in d {
                    *bag.entry(s.as_ref().to_string()).or_insert(0) += 1;
                }
                bag
            })
            .collect();
        Self::from_counts(&bags, min_df)
    }

    /// Number of ids, including UNK.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// True when only UNK is present.
    pub fn is_empty(&self) -> bool {
        self.symbols.len() == 1
    }

    pub fn id(&self, symbol: &str) -> Option<u32> {
        self.ids.get(symbol).copied()
    }

    pub fn symbol(&self, id: u32) -> Option<&str> {
        self.symbols.get(id as usize).map(String::as_str)
    }

    pub fn frequency(&self, id: u32) -> Option<u64> {
        self.freqs.get(id as usize).copied()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Sparse mode: raw counts of in-vocabulary symbols, unknowns dropped.
    pub fn vectorize_counts(&self, doc: &BTreeMap<String, u32>) -> BTreeMap<u32, u32> {
        let mut out = BTreeMap::new();
        for (s, &n) in doc {
            if let Some(id) = self.id(s) {
                if n > 0 {
                    *out.entry(id).or_insert(0) += n;
                }
            }
        }
        out
    }

    /// Sequence mode: unknown symbols map to [`UNK`].
    pub fn vectorize_sequence<S: AsRef<str>>(&self, seq: &[S]) -> Vec<u32> {
        seq.iter().map(|s| self.id(s.as_ref()).unwrap_or(UNK)).collect()
    }

    /// `id \t symbol \t frequency` lines. Backslash, tab, newline and
    /// carriage return inside symbols are escaped.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, (s, f)) in self.symbols.iter().zip(&self.freqs).enumerate() {
            let _ = writeln!(out, "{i}\t{}\t{f}", escape(s));
        }
        out
    }

    pub fn from_tsv(tsv: &str) -> Result<Self> {
        let mut ranked = Vec::new();
        for (lineno, line) in tsv.lines().enumerate() {
            let bad = |m: &str| Error::Parse {
                path: "<vocab>".into(),
                line: lineno + 1,
                message: m.to_string(),
            };
            let mut cols = line.split('\t');
            let (Some(id), Some(sym), Some(freq), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(bad("expected 3 columns"));
            };
            let id: usize = id.parse().map_err(|_| bad("bad id"))?;
            let freq: u64 = freq.parse().map_err(|_| bad("bad frequency"))?;
            if id != lineno {
                return Err(bad("ids must be dense and ordered"));
            }
            if id == 0 {
                if sym != UNK_SYMBOL {
                    return Err(bad("id 0 must be UNK"));
                }
                continue;
            }
            ranked.push((unescape(sym), freq));
        }
        Ok(Self::from_ranked(ranked))
    }

    /// SHA-256 of the TSV rendering.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_tsv().as_bytes()))
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bag(pairs: &[(&str, u32)]) -> BTreeMap<String, u32> {
        pairs.iter().map(|(s, n)| (s.to_string(), *n)).collect()
    }

    #[test]
    fn frequency_then_lexicographic() {
        let v = Vocabulary::from_counts(&[bag(&[("a", 2), ("b", 1)]), bag(&[("b", 1)])], 1);
        assert_eq!(v.symbols(), [UNK_SYMBOL, "a", "b"]);
        assert_eq!(v.frequency(2), Some(2));
        let v = Vocabulary::from_counts(&[bag(&[("z", 5), ("y", 1)])], 1);
        assert_eq!(v.id("z"), Some(1));
    }

    #[test]
    fn min_df_threshold() {
        let v = Vocabulary::from_counts(&[bag(&[("a", 1)]), bag(&[("b", 1)])], 2);
        assert!(v.is_empty());
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn empty_corpus() {
        let v = Vocabulary::from_counts(std::iter::empty(), 1);
        assert_eq!(v.symbols(), [UNK_SYMBOL]);
    }

    #[test]
    fn deterministic() {
        let docs = [bag(&[("q", 3), ("r", 3), ("s", 1)]), bag(&[("s", 2)])];
        assert_eq!(Vocabulary::from_counts(&docs, 1), Vocabulary::from_counts(&docs, 1));
    }

    #[test]
    fn vectorize_modes() {
        let v = Vocabulary::from_counts(&[bag(&[("a", 1)])], 1);
        assert_eq!(
            v.vectorize_counts(&bag(&[("a", 2), ("z", 1)])),
            BTreeMap::from([(1, 2)])
        );
        assert_eq!(v.vectorize_sequence(&["a", "z", "a"]), [1, 0, 1]);
        assert!(v.vectorize_counts(&BTreeMap::new()).is_empty());
        assert!(v.vectorize_sequence::<&str>(&[]).is_empty());
    }

    #[test]
    fn tsv_round_trip_with_awkward_symbols() {
        let v = Vocabulary::from_counts(&[bag(&[("c:a\tb", 2), ("c:\n x", 1), ("w:\\", 1)])], 1);
        let back = Vocabulary::from_tsv(&v.to_tsv()).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.hash(), v.hash());
        assert!(Vocabulary::from_tsv("0\tfoo\t0\n").is_err());
    }

    proptest! {
        #[test]
        fn sequence_round_trip(
            train in prop::collection::vec(prop::collection::vec("[a-e]", 0..10), 1..5),
            probe in prop::collection::vec("[a-h]", 0..15),
        ) {
            let v = Vocabulary::from_sequences(&train, 1);
            let ids = v.vectorize_sequence(&probe);
            for (sym, id) in probe.iter().zip(ids) {
                if v.id(sym).is_some() {
                    prop_assert_eq!(v.symbol(id), Some(sym.as_str()));
                } else {
                    prop_assert_eq!(id, UNK);
                }
            }
            // Dense, bijective ids.
            for (i, s) in v.symbols().iter().enumerate().skip(1) {
                prop_assert_eq!(v.id(s), Some(i as u32));
                prop_assert!(v.frequency(i as u32).unwrap() >= 1);
            }
        }
    }
}
