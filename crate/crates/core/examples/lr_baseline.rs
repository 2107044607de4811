//! The lexical baseline: word and character n-grams into a logistic
//! regression, scored on a stratified split, with the top word features.

use socvar::eval::{evaluate, stratified_split, top_features, FeatureFilter, Ranking};
use socvar::features::{DocInput, FeatureConfig, Features, FittedRepresentation, Representation};
use socvar::labeling::LabeledDocument;
use socvar::models::{lr_train, sparse_from_counts, SparseVec, TrainConfig};
use socvar::synth::{fixture_documents, FIXTURE_SEED};

fn main() -> socvar::Result<()> {
    let (docs, _) = fixture_documents(FIXTURE_SEED)?;
    let split = stratified_split(&docs, 0.8, 7)?;
    let pick = |ids: &[String]| -> Vec<&LabeledDocument> {
        ids.iter()
            .map(|id| docs.iter().find(|d| &d.user_id == id).expect("split id"))
            .collect()
    };
    let (train, test) = (pick(&split.train), pick(&split.test));

    let inputs: Vec<DocInput> = train.iter().map(|d| DocInput::text(&d.text)).collect();
    let fitted = FittedRepresentation::fit(Representation::Lexical, &FeatureConfig::default(), &inputs)?;
    println!(
        "{} train / {} test documents, {} n-gram features",
        train.len(),
        test.len(),
        fitted.bag_vocab.len()
    );

    let encode = |d: &LabeledDocument| -> socvar::Result<SparseVec> {
        match fitted.sparse(DocInput::text(&d.text))?.features {
            Features::Sparse(counts) => Ok(sparse_from_counts(&counts)),
            Features::Sequence(_) => unreachable!("bags are sparse"),
        }
    };
    let data = train
        .iter()
        .map(|d| Ok((encode(d)?, d.label.index())))
        .collect::<socvar::Result<Vec<_>>>()?;
    let (model, curve) = lr_train(&data, fitted.bag_vocab.len(), &TrainConfig::default())?;
    println!("loss {:.4} -> {:.4}", curve.0[0], curve.0[curve.0.len() - 1]);

    let preds = test
        .iter()
        .map(|d| Ok(model.predict(&encode(d)?)))
        .collect::<socvar::Result<Vec<_>>>()?;
    let gold: Vec<usize> = test.iter().map(|d| d.label.index()).collect();
    let report = evaluate(&preds, &gold)?;
    println!(
        "accuracy {:.3}, weighted F1 {:.3}, macro F1 {:.3}",
        report.accuracy, report.weighted_f1, report.macro_f1
    );

    let top = top_features(
        &model,
        &fitted.bag_vocab,
        5,
        FeatureFilter::WordUnigrams,
        Ranking::Positive,
    );
    for (c, feats) in top.iter().enumerate() {
        let words: Vec<&str> = feats.iter().map(|f| f.symbol.trim_start_matches("w:")).collect();
        println!(
            "{:<5} {}",
            socvar::labeling::SilverLabel::from_index(c).to_string(),
            words.join(", ")
        );
    }
    Ok(())
}
