//! Stage-by-stage orchestration over a working directory.
//!
//! Each stage reads the artifacts of the stages before it, checks them
//! against the manifest, writes its own artifacts and records their hashes.

mod config;
mod manifest;

pub use config::{parse_list, parse_orders, ConfigOverrides, PipelineConfig, DEFAULT_WORKDIR, WORKDIR_ENV};
pub use manifest::{sha256_file, Manifest, StageFailure, StageRecord, Workdir, MANIFEST_FILE, MANIFEST_VERSION};

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    filter_english, group_by_author, load_businesses, load_reviews, AuthorProfile, IngestReport, LanguageIdentifier,
};
use crate::error::{Error, Result};
use crate::eval::{
    average_runs, confusion_svg, evaluate, stratified_split, top_features, top_features_tsv, EvalReport, FeatureFilter,
    Split,
};
use crate::features::{
    read_conllu, DocInput, Features, FittedRepresentation, ParsedCorpus, Representation, Vocabulary, UNK,
};
use crate::labeling::{build_documents, label_and_balance, LabeledDocument, SilverLabel};
use crate::models::{
    cnn_train, lr_train, sparse_from_counts, Checkpoint, ModelInput, ModelKind, ModelParams, SparseVec,
};
use crate::readability::{readability_by_class, EasyWords};

pub const PROFILES: &str = "profiles.jsonl";
pub const INGEST_REPORT: &str = "ingest_report.json";
pub const LABELED_AUTHORS: &str = "labeled_authors.jsonl";
pub const DOCUMENTS: &str = "documents.jsonl";
pub const LABELING_SUMMARY: &str = "labeling_summary.json";
pub const READABILITY_REPORT: &str = "readability_report.json";
pub const SPLIT: &str = "split.json";
pub const REPORT: &str = "report.json";
pub const TOP_FEATURES: &str = "top_features.tsv";

pub fn features_file(repr: Representation) -> String {
    format!("features_{repr}.jsonl")
}

/// Vocabulary of the sparse n-gram bag.
pub fn bag_vocab_file(repr: Representation) -> String {
    format!("vocab_{repr}.tsv")
}

/// Vocabulary of the symbol sequence fed to the CNN.
pub fn seq_vocab_file(repr: Representation) -> String {
    format!("vocab_{repr}_seq.tsv")
}

pub fn checkpoint_file(model: ModelKind, repr: Representation, run: usize) -> String {
    format!("models/{model}_{repr}_run{run}.json")
}

pub fn confusion_file(model: ModelKind, repr: Representation) -> String {
    format!("confusion_{model}_{repr}.svg")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Label,
    Readability,
    Featurize,
    Train,
    Evaluate,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Ingest,
        Stage::Label,
        Stage::Readability,
        Stage::Featurize,
        Stage::Train,
        Stage::Evaluate,
        Stage::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Label => "label",
            Stage::Readability => "readability",
            Stage::Featurize => "featurize",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }
}

/// One row of a `features_<repr>.jsonl` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub user_id: String,
    pub class_id: SilverLabel,
    pub split: SplitSide,
    pub counts: BTreeMap<u32, u32>,
    pub sequence: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitSide {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub hash: String,
    pub train: usize,
    pub test: usize,
    pub test_per_class: [usize; 4],
}

/// Scores for one (model, representation) pair, averaged over its runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub model: ModelKind,
    pub representation: Representation,
    pub vocab_size: usize,
    pub vocab_hash: String,
    pub scores: EvalReport,
    pub runs: Vec<EvalReport>,
    pub loss_curves: Vec<Vec<f64>>,
}

/// Contents of `report.json`. Free of timestamps and absolute paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: serde_json::Value,
    pub config_hash: String,
    pub inputs: BTreeMap<String, String>,
    pub split: SplitSummary,
    pub cells: Vec<Cell>,
}

impl PipelineReport {
    pub fn cell(&self, model: ModelKind, repr: Representation) -> Option<&Cell> {
        self.cells.iter().find(|c| c.model == model && c.representation == repr)
    }
}

/// Runs every stage in order, stopping at the first failure.
pub fn run_pipeline(config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    let mut wd = Workdir::open(&config.workdir)?;
    for stage in Stage::ALL {
        run_in(&mut wd, config, stage)?;
    }
    Ok(())
}

/// Runs one stage. On failure the manifest records which stage failed.
pub fn run_stage(config: &PipelineConfig, stage: Stage) -> Result<()> {
    config.validate()?;
    let mut wd = Workdir::open(&config.workdir)?;
    run_in(&mut wd, config, stage)
}

fn run_in(wd: &mut Workdir, config: &PipelineConfig, stage: Stage) -> Result<()> {
    log::info!("stage {stage}");
    let result = match stage {
        Stage::Ingest => ingest(wd, config),
        Stage::Label => label(wd, config),
        Stage::Readability => readability(wd, config),
        Stage::Featurize => featurize(wd, config),
        Stage::Train => train(wd, config),
        Stage::Evaluate => evaluate_stage(wd, config),
        Stage::Report => report(wd, config),
    };
    if let Err(e) = &result {
        if let Err(m) = wd.record_failure(stage.as_str(), e) {
            log::warn!("could not record failure in manifest: {m}");
        }
    }
    result
}

struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn new() -> Self {
        Inputs(BTreeMap::new())
    }

    fn require(&mut self, wd: &Workdir, artifact: &str, producer: Stage) -> Result<()> {
        let hash = wd.require(artifact, producer.as_str())?;
        self.0.insert(artifact.to_string(), hash);
        Ok(())
    }

    fn external(&mut self, name: &str, path: &Path) -> Result<()> {
        self.0.insert(format!("input:{name}"), sha256_file(path)?);
        Ok(())
    }
}

fn finish(wd: &mut Workdir, config: &PipelineConfig, stage: Stage, inputs: Inputs, outputs: &[String]) -> Result<()> {
    wd.record(stage.as_str(), inputs.0, outputs, config.hash(), config.seed)
}

fn required_path<'a>(path: &'a Option<std::path::PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("{flag} is required for this stage")))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn read_vocab(path: &Path) -> Result<Vocabulary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Vocabulary::from_tsv(&text)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn ingest(wd: &mut Workdir, config: &PipelineConfig) -> Result<()> {
    let reviews_path = required_path(&config.reviews, "--reviews")?;
    let businesses_path = required_path(&config.businesses, "--businesses")?;
    let mut inputs = Inputs::new();
    inputs.external("reviews", reviews_path)?;
    inputs.external("businesses", businesses_path)?;

    let mut reader = load_reviews(reviews_path)?;
    let reviews = reader.by_ref().collect::<Result<Vec<_>>>()?;
    let reviews_read = reviews.len();
    let reviews_skipped = reader.skipped();
    let identifier = LanguageIdentifier::bundled();
    let (kept, language) = filter_english(reviews, config.language_filter, &identifier);
    let prices = load_businesses(businesses_path)?;
    let grouping = group_by_author(kept, &prices);

    let report = IngestReport {
        reviews_read,
        reviews_skipped,
        language,
        businesses_priced: prices.prices.len(),
        businesses_excluded: prices.excluded,
        price_conflicts: prices.conflicts,
        unpriced_reviews: grouping.unpriced,
        authors: grouping.profiles.len(),
        authors_dropped: grouping.dropped_authors,
    };
    log::info!(
        "read {} reviews ({} skipped), {} authors profiled",
        report.reviews_read,
        report.reviews_skipped,
        report.authors
    );
    write_jsonl(&wd.path(PROFILES), &grouping.profiles)?;
    write_json(&wd.path(INGEST_REPORT), &report)?;
    finish(
        wd,
        config,
        Stage::Ingest,
        inputs,
        &[PROFILES.into(), INGEST_REPORT.into()],
    )
}

fn label(wd: &mut Workdir, config: &PipelineConfig) -> Result<()> {
    let mut inputs = Inputs::new();
    inputs.require(wd, PROFILES, Stage::Ingest)?;
    let profiles: Vec<AuthorProfile> = read_jsonl(&wd.path(PROFILES))?;
    let (authors, summary) = label_and_balance(&profiles, config.min_reviews, config.seed)?;
    let by_id: BTreeMap<String, AuthorProfile> = profiles.into_iter().map(|p| (p.user_id.clone(), p)).collect();
    let documents = build_documents(&authors, &by_id)?;
    log::info!("{} authors per class after balancing", summary.per_class);
    write_jsonl(&wd.path(LABELED_AUTHORS), &authors)?;
    write_jsonl(&wd.path(DOCUMENTS), &documents)?;
    write_json(&wd.path(LABELING_SUMMARY), &summary)?;
    finish(
        wd,
        config,
        Stage::Label,
        inputs,
        &[LABELED_AUTHORS.into(), DOCUMENTS.into(), LABELING_SUMMARY.into()],
    )
}

fn readability(wd: &mut Workdir, config: &PipelineConfig) -> Result<()> {
    let mut inputs = Inputs::new();
    inputs.require(wd, DOCUMENTS, Stage::Label)?;
    let docs: Vec<LabeledDocument> = read_jsonl(&wd.path(DOCUMENTS))?;
    let custom;
    let easy = match &config.dale_chall_list {
        Some(path) => {
            inputs.external("dale_chall_list", path)?;
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            custom = EasyWords::parse(&text);
            &custom
        }
        None => EasyWords::bundled(),
    };
    let report = readability_by_class(&docs, easy);
    write_json(&wd.path(READABILITY_REPORT), &report)?;
    finish(wd, config, Stage::Readability, inputs, &[READABILITY_REPORT.into()])
}

fn doc_input<'a>(
    d: &'a LabeledDocument,
    repr: Representation,
    parses: Option<&'a ParsedCorpus>,
) -> Result<DocInput<'a>> {
    let parse = match parses {
        Some(p) if repr.needs_parse() => Some(
            p.get(&d.user_id)
                .ok_or_else(|| Error::Consistency(format!("no parse for document {}", d.user_id)))?
                .as_slice(),
        ),
        _ => None,
    };
    Ok(DocInput { text: &d.text, parse })
}

fn featurize(wd: &mut Workdir, config: &PipelineConfig) -> Result<()> {
    let mut inputs = Inputs::new();
    inputs.require(wd, DOCUMENTS, Stage::Label)?;
    let docs: Vec<LabeledDocument> = read_jsonl(&wd.path(DOCUMENTS))?;
    let split = stratified_split(&docs, config.train_fraction, config.seed)?;
    log::info!(
        "split {} train / {} test, test hash {}",
        split.train.len(),
        split.test.len(),
        split.hash()
    );

    let representations = config.representations();
    let parses = if representations.iter().any(|r| r.needs_parse()) {
        let path = required_path(&config.conllu, "--conllu")?;
        inputs.external("conllu", path)?;
        Some(read_conllu(path, None)?)
    } else {
        None
    };
    let by_id: BTreeMap<&str, &LabeledDocument> = docs.iter().map(|d| (d.user_id.as_str(), d)).collect();
    let test_ids: std::collections::BTreeSet<&str> = split.test.iter().map(String::as_str).collect();
    let mut outputs = vec![SPLIT.to_string()];
    write_json(&wd.path(SPLIT), &split)?;
    for repr in representations {
        let train_inputs = split
            .train
            .iter()
            .map(|id| doc_input(by_id[id.as_str()], repr, parses.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let fitted = FittedRepresentation::fit(repr, &config.features, &train_inputs)?;
        let rows = docs
            .iter()
            .map(|d| {
                let input = doc_input(d, repr, parses.as_ref())?;
                let counts = match fitted.sparse(input)?.features {
                    Features::Sparse(c) => c,
                    Features::Sequence(_) => unreachable!("sparse features are a bag"),
                };
                let sequence = match fitted.sequence(input)?.features {
                    Features::Sequence(s) => s,
                    Features::Sparse(_) => unreachable!("sequence features are a sequence"),
                };
                Ok(FeatureRow {
                    user_id: d.user_id.clone(),
                    class_id: d.label,
                    split: if test_ids.contains(d.user_id.as_str()) {
                        SplitSide::Test
                    } else {
                        SplitSide::Train
                    },
                    counts,
                    sequence,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        log::info!(
            "{repr}: {} bag features, {} sequence symbols",
            fitted.bag_vocab.len(),
            fitted.sequence_vocab.len()
        );
        write_jsonl(&wd.path(&features_file(repr)), &rows)?;
        write_text(&wd.path(&bag_vocab_file(repr)), &fitted.bag_vocab.to_tsv())?;
        write_text(&wd.path(&seq_vocab_file(repr)), &fitted.sequence_vocab.to_tsv())?;
        outputs.extend([features_file(repr), bag_vocab_file(repr), seq_vocab_file(repr)]);
    }
    finish(wd, config, Stage::Featurize, inputs, &outputs)
}

fn vocab_file(model: ModelKind, repr: Representation) -> String {
    match model {
        ModelKind::Lr => bag_vocab_file(repr),
        ModelKind::Cnn => seq_vocab_file(repr),
    }
}

fn sequence_or_unk(seq: &[u32]) -> Vec<u32> {
    if seq.is_empty() {
        vec![UNK]
    } else {
        seq.to_vec()
    }
}

fn train(wd: &mut Workdir, config: &PipelineConfig) -> Result<()> {
    let mut inputs = Inputs::new();
    inputs.require(wd, SPLIT, Stage::Featurize)?;
    let models_dir = wd.path("models");
    fs::create_dir_all(&models_dir).map_err(|e| Error::io(&models_dir, e))?;
    let mut outputs = Vec::new();
    for repr in config.representations() {
        inputs.require(wd, &features_file(repr), Stage::Featurize)?;
        let rows: Vec<FeatureRow> = read_jsonl(&wd.path(&features_file(repr)))?;
        let train_rows: Vec<&FeatureRow> = rows.iter().filter(|r| r.split == SplitSide::Train).collect();
        for model in config.models() {
            let vfile = vocab_file(model, repr);
            inputs.require(wd, &vfile, Stage::Featurize)?;
            let vocab = read_vocab(&wd.path(&vfile))?;
            for run in 0..config.runs_for(model) {
                let tc = config.train_config(run);
                log::info!("training {model} on {repr}, run {run}, seed {}", tc.seed);
                let (params, curve) = match model {
                    ModelKind::Lr => {
                        let data: Vec<(SparseVec, usize)> = train_rows
                            .iter()
                            .map(|r| (sparse_from_counts(&r.counts), r.class_id.index()))
                            .collect();
                        let (m, curve) = lr_train(&data, vocab.len(), &tc)?;
                        (ModelParams::Lr(m), curve)
                    }
                    ModelKind::Cnn => {
                        let data: Vec<(Vec<u32>, usize)> = train_rows
                            .iter()
                            .map(|r| (sequence_or_unk(&r.sequence), r.class_id.index()))
                            .collect();
                        let (m, curve) = cnn_train(&data, vocab.len(), &tc)?;
                        (ModelParams::Cnn(m), curve)
                    }
                };
                let name = checkpoint_file(model, repr, run);
                Checkpoint::new(repr, vocab.hash(), run, tc, curve, params).save(&wd.path(&name))?;
                outputs.push(name);
            }
        }
    }
    finish(wd, config, Stage::Train, inputs, &outputs)
}

fn external_inputs(manifest: &Manifest) -> BTreeMap<String, String> {
    manifest
        .stages
        .values()
        .flat_map(|r| r.inputs.iter())
        .filter_map(|(k, v)| k.strip_prefix("input:").map(|name| (name.to_string(), v.clone())))
        .collect()
}

fn evaluate_stage(wd: &mut Workdir, config: &PipelineConfig) -> Result<()> {
    let mut inputs = Inputs::new();
    inputs.require(wd, SPLIT, Stage::Featurize)?;
    let split: Split = read_json(&wd.path(SPLIT))?;
    let split_hash = split.hash();
    let mut cells = Vec::new();
    let mut test_per_class = [0usize; 4];
    for repr in config.representations() {
        inputs.require(wd, &features_file(repr), Stage::Featurize)?;
        let rows: Vec<FeatureRow> = read_jsonl(&wd.path(&features_file(repr)))?;
        let test: Vec<&FeatureRow> = rows.iter().filter(|r| r.split == SplitSide::Test).collect();
        let mut ids: Vec<&str> = test.iter().map(|r| r.user_id.as_str()).collect();
        ids.sort_unstable();
        if ids != split.test.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::Consistency(format!(
                "{} disagrees with {SPLIT} on the test set; rerun `featurize`",
                features_file(repr)
            )));
        }
        test_per_class = [0; 4];
        for r in &test {
            test_per_class[r.class_id.index()] += 1;
        }
        let gold: Vec<usize> = test.iter().map(|r| r.class_id.index()).collect();
        for model in config.models() {
            let vfile = vocab_file(model, repr);
            inputs.require(wd, &vfile, Stage::Featurize)?;
            let vocab = read_vocab(&wd.path(&vfile))?;
            let vocab_hash = vocab.hash();
            let mut runs = Vec::new();
            let mut loss_curves = Vec::new();
            for run in 0..config.runs_for(model) {
                let name = checkpoint_file(model, repr, run);
                inputs.require(wd, &name, Stage::Train)?;
                let ckpt = Checkpoint::load(&wd.path(&name), Some(&vocab_hash))?;
                if ckpt.model.kind() != model || ckpt.representation != repr {
                    return Err(Error::Consistency(format!("{name} holds a different model")));
                }
                let preds = test
                    .iter()
                    .map(|r| {
                        let probs = match model {
                            ModelKind::Lr => ckpt.predict_proba(ModelInput::Sparse(&sparse_from_counts(&r.counts)))?,
                            ModelKind::Cnn => {
                                ckpt.predict_proba(ModelInput::Sequence(&sequence_or_unk(&r.sequence)))?
                            }
                        };
                        Ok(crate::models::argmax(&probs))
                    })
                    .collect::<Result<Vec<_>>>()?;
                runs.push(evaluate(&preds, &gold)?.tagged(model, repr, ckpt.config.seed));
                loss_curves.push(ckpt.loss_curve.0.clone());
            }
            let scores = average_runs(&runs)?;
            log::info!(
                "{model} {repr}: weighted F1 {:.4}, macro F1 {:.4}",
                scores.weighted_f1,
                scores.macro_f1
            );
            cells.push(Cell {
                model,
                representation: repr,
                vocab_size: vocab.len(),
                vocab_hash,
                scores,
                runs,
                loss_curves,
            });
        }
    }
    let report = PipelineReport {
        config: config.echo(),
        config_hash: config.hash(),
        inputs: external_inputs(&wd.manifest),
        split: SplitSummary {
            hash: split_hash,
            train: split.train.len(),
            test: split.test.len(),
            test_per_class,
        },
        cells,
    };
    write_json(&wd.path(REPORT), &report)?;
    finish(wd, config, Stage::Evaluate, inputs, &[REPORT.into()])
}

fn report(wd: &mut Workdir, config: &PipelineConfig) -> Result<()> {
    let mut inputs = Inputs::new();
    inputs.require(wd, REPORT, Stage::Evaluate)?;
    let report: PipelineReport = read_json(&wd.path(REPORT))?;
    let mut outputs = Vec::new();
    let mut tsv = String::from("representation\tclass\trank\tsymbol\tweight\n");
    for cell in &report.cells {
        let (model, repr) = (cell.model, cell.representation);
        let name = confusion_file(model, repr);
        let title = format!("{model} / {repr} (weighted F1 {:.3})", cell.scores.weighted_f1);
        write_text(&wd.path(&name), &confusion_svg(&cell.scores.confusion, &title))?;
        outputs.push(name);
        if model != ModelKind::Lr {
            continue;
        }
        let ckpt_name = checkpoint_file(model, repr, 0);
        inputs.require(wd, &ckpt_name, Stage::Train)?;
        let vfile = bag_vocab_file(repr);
        inputs.require(wd, &vfile, Stage::Featurize)?;
        let vocab = read_vocab(&wd.path(&vfile))?;
        let ckpt = Checkpoint::load(&wd.path(&ckpt_name), Some(&vocab.hash()))?;
        let ModelParams::Lr(lr) = &ckpt.model else {
            return Err(Error::Consistency(format!("{ckpt_name} is not a logistic regression")));
        };
        let filter = match repr {
            Representation::Lexical => FeatureFilter::WordUnigrams,
            _ => FeatureFilter::All,
        };
        let per_class = top_features(lr, &vocab, config.top_k, filter, config.ranking);
        for line in top_features_tsv(&per_class).lines().skip(1) {
            tsv.push_str(&format!("{repr}\t{line}\n"));
        }
    }
    write_text(&wd.path(TOP_FEATURES), &tsv)?;
    outputs.push(TOP_FEATURES.into());
    finish(wd, config, Stage::Report, inputs, &outputs)
}
