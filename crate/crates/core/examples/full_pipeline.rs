//! Every stage on the bundled fixture, the same as `socvar run`, followed by
//! a summary of report.json.
//!
//! ```text
//! cargo run --release --example full_pipeline -- [workdir]
//! ```

use std::path::{Path, PathBuf};

use socvar::pipeline::{read_json, run_pipeline, PipelineConfig, PipelineReport, REPORT};

fn main() -> socvar::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let workdir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("socvar-full-pipeline"));
    let mut config = PipelineConfig {
        reviews: Some(fixtures.join("reviews.jsonl")),
        businesses: Some(fixtures.join("businesses.jsonl")),
        conllu: Some(fixtures.join("parses.conllu")),
        workdir: workdir.clone(),
        ..Default::default()
    };
    config.train.epochs = 40;
    config.train.n_filters = 32;
    config.train.d_emb = 16;
    config.train.d_hidden = 16;
    config.train.learning_rate = 0.005;

    run_pipeline(&config)?;
    let report: PipelineReport = read_json(&workdir.join(REPORT))?;
    println!("artifacts in {}", workdir.display());
    println!(
        "split {} train / {} test (test hash {})",
        report.split.train,
        report.split.test,
        &report.split.hash[..12]
    );
    println!(
        "{:<6} {:<10} {:>9} {:>12} {:>9}",
        "model", "repr", "features", "weighted F1", "macro F1"
    );
    for cell in &report.cells {
        println!(
            "{:<6} {:<10} {:>9} {:>12.3} {:>9.3}",
            cell.model.as_str(),
            cell.representation.as_str(),
            cell.vocab_size,
            cell.scores.weighted_f1,
            cell.scores.macro_f1
        );
    }
    Ok(())
}
