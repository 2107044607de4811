//! Regenerates the bundled 40-author fixture.
//!
//! ```text
//! cargo run --example make_fixture -- [output-dir] [seed]
//! ```

use std::path::PathBuf;

use socvar::synth::{write_fixture, FIXTURE_SEED};

fn main() -> socvar::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    let seed = match args.next() {
        Some(s) => s
            .parse()
            .map_err(|_| socvar::Error::Config(format!("seed must be an integer, got {s:?}")))?,
        None => FIXTURE_SEED,
    };
    write_fixture(&dir, seed)?;
    println!(
        "wrote reviews.jsonl, businesses.jsonl and parses.conllu to {}",
        dir.display()
    );
    Ok(())
}
