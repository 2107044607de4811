use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::LanguageFilter;
use crate::error::{Error, Result};
use crate::eval::Ranking;
use crate::features::{FeatureConfig, FrequencyField, Representation};
use crate::labeling::DEFAULT_MIN_REVIEWS;
use crate::models::{ModelKind, TrainConfig};

/// Environment variable that overrides the default working directory.
pub const WORKDIR_ENV: &str = "SOCVAR_WORKDIR";
pub const DEFAULT_WORKDIR: &str = "socvar-work";

/// Everything a pipeline run depends on. Loadable from TOML; every field
/// is optional there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub reviews: Option<PathBuf>,
    pub businesses: Option<PathBuf>,
    pub conllu: Option<PathBuf>,
    pub dale_chall_list: Option<PathBuf>,
    pub workdir: PathBuf,
    pub seed: u64,
    pub min_reviews: usize,
    pub train_fraction: f64,
    pub language_filter: LanguageFilter,
    pub representations: Vec<Representation>,
    pub models: Vec<ModelKind>,
    /// Training runs averaged per CNN cell. LR is trained once.
    pub runs: usize,
    pub top_k: usize,
    pub ranking: Ranking,
    pub features: FeatureConfig,
    pub train: TrainConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            reviews: None,
            businesses: None,
            conllu: None,
            dale_chall_list: None,
            workdir: PathBuf::from(DEFAULT_WORKDIR),
            seed: 42,
            min_reviews: DEFAULT_MIN_REVIEWS,
            train_fraction: 0.8,
            language_filter: LanguageFilter::Detect,
            representations: Representation::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            runs: 2,
            top_k: 10,
            ranking: Ranking::Positive,
            features: FeatureConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub reviews: Option<PathBuf>,
    pub businesses: Option<PathBuf>,
    pub conllu: Option<PathBuf>,
    pub dale_chall_list: Option<PathBuf>,
    pub workdir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub min_reviews: Option<usize>,
    pub train_fraction: Option<f64>,
    pub language_filter: Option<LanguageFilter>,
    pub representations: Option<Vec<Representation>>,
    pub models: Option<Vec<ModelKind>>,
    pub runs: Option<usize>,
    pub top_k: Option<usize>,
    pub ranking: Option<Ranking>,
    pub word_ngrams: Option<BTreeSet<usize>>,
    pub char_ngrams: Option<BTreeSet<usize>>,
    pub freq_buckets: bool,
    pub min_df: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub dropout: Option<f64>,
    pub l2: Option<f64>,
    pub d_emb: Option<usize>,
    pub n_filters: Option<usize>,
    pub window: Option<usize>,
    pub d_hidden: Option<usize>,
    pub max_seq_len: Option<usize>,
}

macro_rules! set {
    ($target:expr, $value:expr) => {
        if let Some(v) = $value {
            $target = v;
        }
    };
}

impl PipelineConfig {
    /// Reads a TOML config file, or starts from defaults, then applies
    /// overrides and validates.
    pub fn load(file: Option<&Path>, overrides: ConfigOverrides) -> Result<Self> {
        let mut config = match file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => PipelineConfig::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: ConfigOverrides) {
        if o.reviews.is_some() {
            self.reviews = o.reviews;
        }
        if o.businesses.is_some() {
            self.businesses = o.businesses;
        }
        if o.conllu.is_some() {
            self.conllu = o.conllu;
        }
        if o.dale_chall_list.is_some() {
            self.dale_chall_list = o.dale_chall_list;
        }
        set!(self.workdir, o.workdir);
        set!(self.seed, o.seed);
        set!(self.min_reviews, o.min_reviews);
        set!(self.train_fraction, o.train_fraction);
        set!(self.language_filter, o.language_filter);
        set!(self.representations, o.representations);
        set!(self.models, o.models);
        set!(self.runs, o.runs);
        set!(self.top_k, o.top_k);
        set!(self.ranking, o.ranking);
        set!(self.features.word_ngrams, o.word_ngrams);
        set!(self.features.char_ngrams, o.char_ngrams);
        if o.freq_buckets {
            self.features.frequency_field = FrequencyField::Log10Bucket;
        }
        set!(self.features.min_df, o.min_df);
        let t = &mut self.train;
        set!(t.epochs, o.epochs);
        set!(t.learning_rate, o.learning_rate);
        set!(t.batch_size, o.batch_size);
        set!(t.dropout, o.dropout);
        set!(t.l2, o.l2);
        set!(t.d_emb, o.d_emb);
        set!(t.n_filters, o.n_filters);
        set!(t.window, o.window);
        set!(t.d_hidden, o.d_hidden);
        set!(t.max_seq_len, o.max_seq_len);
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!("train fraction must be in (0, 1), got {}", self.train_fraction));
        }
        if self.representations.is_empty() || self.models.is_empty() {
            return bad("at least one representation and one model are required".into());
        }
        if self.conllu.is_none() {
            if let Some(r) = self.representations.iter().find(|r| r.needs_parse()) {
                return bad(format!("representation {r} needs --conllu"));
            }
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.top_k == 0 {
            return bad("top-k must be at least 1".into());
        }
        if self.min_reviews == 0 {
            return bad("min-reviews must be at least 1".into());
        }
        if self.features.word_ngrams.contains(&0) || self.features.char_ngrams.contains(&0) {
            return bad("n-gram orders must be positive".into());
        }
        if self.features.word_ngrams.is_empty() {
            return bad("at least one word n-gram order is required".into());
        }
        self.train.validate()
    }

    /// Requested representations in canonical order, without repeats.
    pub fn representations(&self) -> Vec<Representation> {
        Representation::ALL
            .into_iter()
            .filter(|r| self.representations.contains(r))
            .collect()
    }

    pub fn models(&self) -> Vec<ModelKind> {
        ModelKind::ALL.into_iter().filter(|m| self.models.contains(m)).collect()
    }

    pub fn runs_for(&self, model: ModelKind) -> usize {
        match model {
            ModelKind::Lr => 1,
            ModelKind::Cnn => self.runs,
        }
    }

    /// Training configuration for one run; run `k` uses seed `seed + k`.
    pub fn train_config(&self, run: usize) -> TrainConfig {
        TrainConfig {
            seed: self.seed.wrapping_add(run as u64),
            ..self.train.clone()
        }
    }

    /// The configuration with every path removed, as recorded in artifacts.
    pub fn echo(&self) -> serde_json::Value {
        let mut clean = self.clone();
        clean.reviews = None;
        clean.businesses = None;
        clean.conllu = None;
        clean.dale_chall_list = None;
        clean.workdir = PathBuf::new();
        clean.train.seed = self.seed;
        clean.representations = self.representations();
        clean.models = self.models();
        let mut v = serde_json::to_value(&clean).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            for key in ["reviews", "businesses", "conllu", "dale_chall_list", "workdir"] {
                obj.remove(key);
            }
        }
        v
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo().to_string().as_bytes()))
    }
}

/// Parses n-gram orders such as `1,3-6`.
pub fn parse_orders(text: &str) -> Result<BTreeSet<usize>> {
    let bad = || Error::Config(format!("bad n-gram orders {text:?}; expected e.g. 1,3-6"));
    let mut out = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a == 0 || a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => {
                let n: usize = part.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                out.insert(n);
            }
        }
    }
    Ok(out)
}

/// Parses a comma-separated list with `FromStr` items.
pub fn parse_list<T>(text: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr<Err = Error>,
{
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(parse_orders("1,3-6").unwrap(), [1, 3, 4, 5, 6].into());
        assert_eq!(parse_orders("2").unwrap(), [2].into());
        assert!(parse_orders("0").is_err());
        assert!(parse_orders("5-3").is_err());
        assert!(parse_orders("x").is_err());
    }

    #[test]
    fn lists() {
        let r: Vec<Representation> = parse_list("lexical, pos").unwrap();
        assert_eq!(r, [Representation::Lexical, Representation::Pos]);
        assert!(parse_list::<ModelKind>("lr,svm").is_err());
    }

    #[test]
    fn parse_representations_need_conllu() {
        let cfg = PipelineConfig::default();
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.contains("--conllu")));
        let ok = PipelineConfig {
            representations: vec![Representation::Lexical, Representation::Bleach],
            ..Default::default()
        };
        ok.validate().unwrap();
    }

    #[test]
    fn flags_beat_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(
            &path,
            "seed = 7\nrepresentations = [\"lexical\"]\nruns = 3\n[train]\nepochs = 4\n",
        )
        .unwrap();
        let cfg = PipelineConfig::load(
            Some(&path),
            ConfigOverrides {
                seed: Some(9),
                freq_buckets: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.runs, 3);
        assert_eq!(cfg.train.epochs, 4);
        assert_eq!(cfg.train.learning_rate, 0.001);
        assert_eq!(cfg.features.frequency_field, FrequencyField::Log10Bucket);
        fs::write(&path, "sede = 1\n").unwrap();
        assert!(PipelineConfig::load(Some(&path), ConfigOverrides::default()).is_err());
    }

    #[test]
    fn echo_has_no_paths() {
        let cfg = PipelineConfig {
            reviews: Some("/abs/reviews.jsonl".into()),
            workdir: "/tmp/w".into(),
            ..Default::default()
        };
        let text = cfg.echo().to_string();
        assert!(!text.contains("/abs") && !text.contains("/tmp"));
        let moved = PipelineConfig {
            reviews: Some("elsewhere.jsonl".into()),
            ..cfg.clone()
        };
        assert_eq!(cfg.hash(), moved.hash());
    }
}
