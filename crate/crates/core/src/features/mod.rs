//! Document representations: lexical n-grams, bleached tokens, UPOS
//! sequences and dependency triplets, plus the vocabulary that maps their
//! symbols to ids.

mod bleach;
mod conllu;
mod ngrams;
mod tokenize;
mod vocab;

pub use bleach::{bleach_token, bleach_token_with, FrequencyField, TokenFrequencies};
pub use conllu::{
    dep_triplets, parse_conllu, pos_sequence, read_conllu, ParsedCorpus, ParsedSentence, ParsedToken, Upos,
};
pub use ngrams::{add_word_ngrams, extract_ngrams, NgramCounts};
pub use tokenize::tokenize;
pub use vocab::{Vocabulary, UNK, UNK_SYMBOL};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Lexical,
    Bleach,
    Pos,
    #[serde(rename = "deptriple")]
    DepTriple,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Lexical,
        Representation::Bleach,
        Representation::Pos,
        Representation::DepTriple,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Lexical => "lexical",
            Representation::Bleach => "bleach",
            Representation::Pos => "pos",
            Representation::DepTriple => "deptriple",
        }
    }

    /// POS and dependency representations read a parse.
    pub fn needs_parse(self) -> bool {
        matches!(self, Representation::Pos | Representation::DepTriple)
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Representation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown representation {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Features {
    Sparse(BTreeMap<u32, u32>),
    Sequence(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDoc {
    pub representation: Representation,
    pub features: Features,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub word_ngrams: BTreeSet<usize>,
    pub char_ngrams: BTreeSet<usize>,
    pub frequency_field: FrequencyField,
    pub min_df: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            word_ngrams: [1, 3, 4, 5, 6].into(),
            char_ngrams: (3..=6).collect(),
            frequency_field: FrequencyField::Raw,
            min_df: 1,
        }
    }
}

/// One document as seen by the featurizer.
#[derive(Debug, Clone, Copy)]
pub struct DocInput<'a> {
    pub text: &'a str,
    pub parse: Option<&'a [ParsedSentence]>,
}

impl<'a> DocInput<'a> {
    pub fn text(text: &'a str) -> Self {
        DocInput { text, parse: None }
    }

    fn parse(&self, repr: Representation) -> Result<&'a [ParsedSentence]> {
        self.parse
            .ok_or_else(|| Error::InvalidInput(format!("{repr} representation needs a dependency parse")))
    }
}

/// Symbol sequence of `doc` under `repr`. Bleaching needs training token
/// frequencies; unseen tokens get frequency 0.
pub fn symbols(
    repr: Representation,
    doc: DocInput<'_>,
    token_freqs: Option<&TokenFrequencies>,
    field: FrequencyField,
) -> Result<Vec<String>> {
    match repr {
        Representation::Lexical => Ok(tokenize(doc.text)),
        Representation::Bleach => {
            let freqs =
                token_freqs.ok_or_else(|| Error::InvalidInput("bleaching needs training token frequencies".into()))?;
            Ok(tokenize(doc.text)
                .iter()
                .map(|t| bleach_token_with(t, freqs.get(t), field))
                .collect())
        }
        Representation::Pos => Ok(pos_sequence(doc.parse(repr)?)),
        Representation::DepTriple => dep_triplets(doc.parse(repr)?),
    }
}

/// A representation fitted on the training split: token frequencies (for
/// bleaching) and the two vocabularies, one for sequences and one for the
/// sparse n-gram bag.
#[derive(Debug, Clone)]
pub struct FittedRepresentation {
    pub representation: Representation,
    pub config: FeatureConfig,
    token_freqs: Option<TokenFrequencies>,
    pub sequence_vocab: Vocabulary,
    pub bag_vocab: Vocabulary,
}

impl FittedRepresentation {
    pub fn fit(representation: Representation, config: &FeatureConfig, train: &[DocInput<'_>]) -> Result<Self> {
        let token_freqs = (representation == Representation::Bleach)
            .then(|| TokenFrequencies::count(train.iter().flat_map(|d| tokenize(d.text))));
        let mut fitted = FittedRepresentation {
            representation,
            config: config.clone(),
            token_freqs,
            sequence_vocab: Vocabulary::default(),
            bag_vocab: Vocabulary::default(),
        };
        let seqs = train.iter().map(|d| fitted.symbols(*d)).collect::<Result<Vec<_>>>()?;
        let bags = train
            .iter()
            .zip(&seqs)
            .map(|(d, s)| fitted.bag_from_symbols(d.text, s))
            .collect::<Vec<_>>();
        fitted.sequence_vocab = Vocabulary::from_sequences(&seqs, config.min_df);
        fitted.bag_vocab = Vocabulary::from_counts(&bags, config.min_df);
        Ok(fitted)
    }

    pub fn symbols(&self, doc: DocInput<'_>) -> Result<Vec<String>> {
        symbols(
            self.representation,
            doc,
            self.token_freqs.as_ref(),
            self.config.frequency_field,
        )
    }

    /// Lexical bags combine word and character n-grams; the abstract
    /// representations use n-grams over their own symbols only.
    fn bag_from_symbols(&self, text: &str, symbols: &[String]) -> NgramCounts {
        match self.representation {
            Representation::Lexical => {
                extract_ngrams(symbols, text, &self.config.word_ngrams, &self.config.char_ngrams)
            }
            _ => extract_ngrams(symbols, "", &self.config.word_ngrams, &BTreeSet::new()),
        }
    }

    pub fn bag(&self, doc: DocInput<'_>) -> Result<NgramCounts> {
        let s = self.symbols(doc)?;
        Ok(self.bag_from_symbols(doc.text, &s))
    }

    pub fn sparse(&self, doc: DocInput<'_>) -> Result<FeatureDoc> {
        Ok(FeatureDoc {
            representation: self.representation,
            features: Features::Sparse(self.bag_vocab.vectorize_counts(&self.bag(doc)?)),
        })
    }

    pub fn sequence(&self, doc: DocInput<'_>) -> Result<FeatureDoc> {
        Ok(FeatureDoc {
            representation: self.representation,
            features: Features::Sequence(self.sequence_vocab.vectorize_sequence(&self.symbols(doc)?)),
        })
    }

    pub fn token_frequency(&self, token: &str) -> u64 {
        self.token_freqs.as_ref().map_or(0, |f| f.get(token))
    }
}
