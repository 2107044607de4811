//! Readability scores for single texts and per price class, with a
//! Kruskal-Wallis test of the class differences.
//!
//! ```text
//! cargo run --example readability -- "Any text you want scored."
//! ```

use socvar::readability::{compute_readability, readability_by_class, text_stats, EasyWords, ReadabilityScores};
use socvar::synth::{fixture_documents, FIXTURE_SEED};

fn main() -> socvar::Result<()> {
    let mut texts: Vec<String> = vec![
        "Great pizza. So good! We came back twice.".into(),
        "The sommelier's recommendations were impeccable, and every course was beautifully balanced.".into(),
    ];
    texts.extend(std::env::args().skip(1));
    for text in &texts {
        let stats = text_stats(text);
        println!("{text}\n  {stats:?}");
        match compute_readability(&stats) {
            Ok(s) => {
                for (name, v) in ReadabilityScores::METRICS.iter().zip(s.values()) {
                    print!("  {name} {v:.2}");
                }
                println!();
            }
            Err(e) => println!("  {e}"),
        }
    }

    let (docs, _) = fixture_documents(FIXTURE_SEED)?;
    let report = readability_by_class(&docs, EasyWords::bundled());
    println!("\nclass means on the fixture:");
    print!("{:<16}", "metric");
    for c in &report.classes {
        print!("{:>10}", "$".repeat(c.class_id as usize));
    }
    println!("{:>10} {:>8}", "H", "p <");
    for (m, name) in ReadabilityScores::METRICS.iter().enumerate() {
        print!("{name:<16}");
        for c in &report.classes {
            print!("{:>10.2}", c.means.values()[m]);
        }
        let test = &report.tests[*name];
        println!(
            "{:>10.2} {:>8}",
            test.h,
            serde_json::to_string(&test.significant_at)?.trim_matches('"')
        );
    }
    println!("increasing with price: {:?}", report.increasing);
    println!("decreasing with price: {:?}", report.decreasing);
    Ok(())
}
