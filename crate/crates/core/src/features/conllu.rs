//! CoNLL-U reader and the two parse-derived representations (UPOS sequences
//! and dependency triplets).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 17 universal part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Upos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Adj,
        Upos::Adp,
        Upos::Adv,
        Upos::Aux,
        Upos::Cconj,
        Upos::Det,
        Upos::Intj,
        Upos::Noun,
        Upos::Num,
        Upos::Part,
        Upos::Pron,
        Upos::Propn,
        Upos::Punct,
        Upos::Sconj,
        Upos::Sym,
        Upos::Verb,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Upos::ALL
            .into_iter()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| format!("unknown UPOS tag {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedToken {
    pub form: String,
    pub upos: Upos,
    /// 1-based index of the head within the sentence; 0 for the root.
    pub head: usize,
    pub deprel: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedSentence {
    pub tokens: Vec<ParsedToken>,
}

/// Parsed documents keyed by document id, sentences in file order.
pub type ParsedCorpus = BTreeMap<String, Vec<ParsedSentence>>;

fn doc_id_comment(line: &str) -> Option<&str> {
    let body = line.strip_prefix('#')?.trim_start();
    let rest = body.strip_prefix("doc_id").or_else(|| body.strip_prefix("newdoc id"))?;
    Some(rest.trim_start().strip_prefix('=')?.trim())
}

/// Reads CoNLL-U from `reader`.
///
/// Sentences bind to the most recent `# doc_id = …` (or `# newdoc id = …`)
/// comment. When `known` is given, a document id outside it is an error, as
/// is a sentence that precedes every document comment.
pub fn parse_conllu<R: BufRead>(reader: R, path: &Path, known: Option<&BTreeSet<String>>) -> Result<ParsedCorpus> {
    let mut corpus = ParsedCorpus::new();
    let mut doc: Option<String> = None;
    let mut current = ParsedSentence::default();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut flush = |doc: &Option<String>, sentence: &mut ParsedSentence, line: usize| -> Result<()> {
        if sentence.tokens.is_empty() {
            return Ok(());
        }
        let Some(id) = doc else {
            return Err(parse_err(line, "sentence before any doc_id comment".into()));
        };
        corpus.entry(id.clone()).or_default().push(std::mem::take(sentence));
        Ok(())
    };

    let mut lineno = 0;
    for line in reader.lines() {
        lineno += 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&doc, &mut current, lineno)?;
            continue;
        }
        if line.starts_with('#') {
            if let Some(id) = doc_id_comment(line) {
                flush(&doc, &mut current, lineno)?;
                if let Some(known) = known {
                    if !known.contains(id) {
                        return Err(parse_err(lineno, format!("unknown doc_id {id:?}")));
                    }
                }
                doc = Some(id.to_string());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(parse_err(lineno, format!("expected 10 columns, found {}", cols.len())));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        id.parse::<usize>()
            .map_err(|_| parse_err(lineno, format!("bad token id {id:?}")))?;
        let upos = cols[3].parse::<Upos>().map_err(|m| parse_err(lineno, m))?;
        let head = cols[6]
            .parse::<usize>()
            .map_err(|_| parse_err(lineno, format!("bad head {:?}", cols[6])))?;
        current.tokens.push(ParsedToken {
            form: cols[1].to_string(),
            upos,
            head,
            deprel: cols[7].to_string(),
        });
    }
    flush(&doc, &mut current, lineno + 1)?;
    Ok(corpus)
}

pub fn read_conllu(path: &Path, known: Option<&BTreeSet<String>>) -> Result<ParsedCorpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(BufReader::new(file), path, known)
}

/// UPOS tags in token order across sentences.
pub fn pos_sequence(sentences: &[ParsedSentence]) -> Vec<String> {
    sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .map(|t| t.upos.as_str().to_string())
        .collect()
}

pub const ROOT: &str = "ROOT";
pub const ARROW: char = '\u{2192}';

/// `UPOS→deprel→HEAD_UPOS` per token, with `ROOT` as the head tag of the root.
pub fn dep_triplets(sentences: &[ParsedSentence]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for s in sentences {
        for (i, t) in s.tokens.iter().enumerate() {
            let head = match t.head {
                0 => ROOT,
                h => s.tokens.get(h - 1).map(|ht| ht.upos.as_str()).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "token {} ({}) has head {h} outside sentence of {} tokens",
                        i + 1,
                        t.form,
                        s.tokens.len()
                    ))
                })?,
            };
            out.push(format!("{}{ARROW}{}{ARROW}{}", t.upos, t.deprel, head));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I_LOVE_PIZZA: &str = "# doc_id = u1\n\
        # text = I love pizza .\n\
        1\tI\tI\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n\
        2\tlove\tlove\tVERB\tVBP\t_\t0\troot\t_\t_\n\
        3\tpizza\tpizza\tNOUN\tNN\t_\t2\tobj\t_\t_\n\
        4\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_\n\n";

    fn parse(s: &str) -> Result<ParsedCorpus> {
        parse_conllu(s.as_bytes(), Path::new("t.conllu"), None)
    }

    #[test]
    fn reads_sentence() {
        let c = parse(I_LOVE_PIZZA).unwrap();
        let s = &c["u1"];
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].tokens.len(), 4);
        assert_eq!(s[0].tokens[1].head, 0);
        assert_eq!(s[0].tokens[1].form, "love");
        assert_eq!(pos_sequence(s), ["PRON", "VERB", "NOUN", "PUNCT"]);
        assert_eq!(
            dep_triplets(s).unwrap(),
            ["PRON→nsubj→VERB", "VERB→root→ROOT", "NOUN→obj→VERB", "PUNCT→punct→VERB"]
        );
    }

    #[test]
    fn skips_ranges_and_empty_nodes() {
        let text = "# newdoc id = d\n\
            1\tI\t_\tPRON\t_\t_\t2\tnsubj\t_\t_\n\
            2\tlike\t_\tVERB\t_\t_\t0\troot\t_\t_\n\
            3-4\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
            3\tdo\t_\tAUX\t_\t_\t2\taux\t_\t_\n\
            4\tn't\t_\tPART\t_\t_\t2\tadvmod\t_\t_\n\
            4.1\tgo\t_\tVERB\t_\t_\t_\t_\t_\t_\n";
        let c = parse(text).unwrap();
        let forms: Vec<_> = c["d"][0].tokens.iter().map(|t| t.form.as_str()).collect();
        assert_eq!(forms, ["I", "like", "do", "n't"]);
    }

    #[test]
    fn empty_file() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn repeated_sentences_concatenate() {
        let twice = format!("{I_LOVE_PIZZA}{}", I_LOVE_PIZZA.replace("# doc_id = u1\n", ""));
        let c = parse(&twice).unwrap();
        let seq = pos_sequence(&c["u1"]);
        assert_eq!(seq.len(), 8);
        assert_eq!(seq[..4], seq[4..]);
        assert!(pos_sequence(&[]).is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "# doc_id = a\n1\tx\t_\tNOUN\t_\t_\t0\n";
        match parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad_tag = "# doc_id = a\n1\tx\t_\tNOUNY\t_\t_\t0\troot\t_\t_\n";
        assert!(matches!(parse(bad_tag), Err(Error::Parse { line: 2, .. })));
        let orphan = "1\tx\t_\tNOUN\t_\t_\t0\troot\t_\t_\n";
        assert!(parse(orphan).is_err());
    }

    #[test]
    fn unknown_doc_id() {
        let known: BTreeSet<String> = ["other".to_string()].into();
        let r = parse_conllu(I_LOVE_PIZZA.as_bytes(), Path::new("t"), Some(&known));
        assert!(matches!(r, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn head_out_of_range() {
        let s = ParsedSentence {
            tokens: vec![ParsedToken {
                form: "x".into(),
                upos: Upos::Noun,
                head: 5,
                deprel: "dep".into(),
            }],
        };
        assert!(dep_triplets(&[s]).is_err());
    }
}
