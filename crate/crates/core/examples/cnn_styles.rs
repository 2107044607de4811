//! A convolutional classifier over abstract symbol sequences. Each
//! representation hides a different amount of the original wording.
//!
//! ```text
//! cargo run --release --example cnn_styles -- [epochs]
//! ```

use socvar::eval::{evaluate, stratified_split};
use socvar::features::{DocInput, FeatureConfig, Features, FittedRepresentation, Representation};
use socvar::models::{cnn_train, CnnModel, TrainConfig};
use socvar::synth::{fixture_documents, FIXTURE_SEED};

fn main() -> socvar::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|e| e.parse().ok()).unwrap_or(40);
    let (docs, parses) = fixture_documents(FIXTURE_SEED)?;
    let split = stratified_split(&docs, 0.8, 3)?;
    let input = |id: &str| {
        let d = docs.iter().find(|d| d.user_id == id).expect("split id");
        (
            DocInput {
                text: &d.text,
                parse: parses.get(id).map(Vec::as_slice),
            },
            d.label.index(),
        )
    };
    let config = TrainConfig {
        epochs,
        d_emb: 16,
        n_filters: 32,
        d_hidden: 16,
        learning_rate: 0.005,
        ..Default::default()
    };

    println!(
        "{:<10} {:>7} {:>10} {:>12}",
        "repr", "symbols", "final loss", "weighted F1"
    );
    for repr in Representation::ALL {
        let train: Vec<_> = split.train.iter().map(|id| input(id)).collect();
        let inputs: Vec<DocInput> = train.iter().map(|(d, _)| *d).collect();
        let fitted = FittedRepresentation::fit(repr, &FeatureConfig::default(), &inputs)?;
        let encode = |d: DocInput| -> socvar::Result<Vec<u32>> {
            match fitted.sequence(d)?.features {
                Features::Sequence(s) if !s.is_empty() => Ok(s),
                Features::Sequence(_) => Ok(vec![0]),
                Features::Sparse(_) => unreachable!("sequences are dense"),
            }
        };
        let data = train
            .iter()
            .map(|(d, y)| Ok((encode(*d)?, *y)))
            .collect::<socvar::Result<Vec<_>>>()?;
        let (model, curve): (CnnModel, _) = cnn_train(&data, fitted.sequence_vocab.len(), &config)?;
        let mut preds = Vec::new();
        let mut gold = Vec::new();
        for id in &split.test {
            let (d, y) = input(id);
            preds.push(model.predict(&encode(d)?)?);
            gold.push(y);
        }
        let f1 = evaluate(&preds, &gold)?.weighted_f1;
        println!(
            "{:<10} {:>7} {:>10.4} {:>12.3}",
            repr.as_str(),
            fitted.sequence_vocab.len(),
            curve.0.last().copied().unwrap_or(f64::NAN),
            f1
        );
    }
    Ok(())
}
