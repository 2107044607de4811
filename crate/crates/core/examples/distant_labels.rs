//! Distant labels from restaurant prices: every author gets the price range
//! they review most, noisy authors are filtered by label entropy and review
//! count, and classes are downsampled to the same size.

use std::collections::BTreeMap;
use std::path::Path;

use socvar::corpus::{
    filter_english, group_by_author, read_businesses, LanguageFilter, LanguageIdentifier, ReviewReader,
};
use socvar::labeling::{build_documents, label_and_balance, label_entropy, DEFAULT_MIN_REVIEWS};
use socvar::synth::{fixture, synthetic_profiles, FIXTURE_SEED};

fn main() -> socvar::Result<()> {
    println!("label entropy (nats) of a few price histograms:");
    for counts in [
        vec![(2u8, 16usize)],
        vec![(1, 3), (2, 5), (3, 4), (4, 4)],
        vec![(3, 9), (4, 1)],
    ] {
        let counts: BTreeMap<u8, usize> = counts.into_iter().collect();
        println!("  {counts:?} -> {:.3}", label_entropy(&counts));
    }

    // The bundled fixture, end to end in memory.
    let files = fixture(FIXTURE_SEED);
    let mut reader = ReviewReader::new(files.reviews.as_bytes());
    let reviews = reader.by_ref().collect::<socvar::Result<Vec<_>>>()?;
    println!(
        "\nfixture: {} reviews read, {} malformed lines skipped",
        reviews.len(),
        reader.skipped()
    );
    let (english, tally) = filter_english(reviews, LanguageFilter::Detect, &LanguageIdentifier::bundled());
    println!("language filter: {tally:?}");
    let prices = read_businesses(files.businesses.as_bytes(), Path::new("businesses.jsonl"))?;
    println!(
        "businesses: {} priced, {} excluded, {} conflicting duplicates",
        prices.prices.len(),
        prices.excluded,
        prices.conflicts
    );
    let grouping = group_by_author(english, &prices);
    let (authors, summary) = label_and_balance(&grouping.profiles, DEFAULT_MIN_REVIEWS, FIXTURE_SEED)?;
    println!(
        "{} profiles, {} tied, mean entropy {:.3}, after filtering {:?}, balanced to {} per class",
        summary.profiled_authors,
        summary.tied_authors,
        summary.mean_entropy.unwrap_or(f64::NAN),
        summary.after_filter,
        summary.per_class
    );
    let profiles = grouping.profiles.into_iter().map(|p| (p.user_id.clone(), p)).collect();
    let docs = build_documents(&authors, &profiles)?;
    for d in docs.iter().take(4) {
        let preview: String = d
            .text
            .chars()
            .take(60)
            .map(|c| if c == '\n' { ' ' } else { c })
            .collect();
        println!("  {} {:<5} {preview}...", d.user_id, d.label.to_string());
    }

    // A larger random population shows how the entropy threshold behaves.
    let population = synthetic_profiles(2000, 1);
    let (_, big) = label_and_balance(&population, DEFAULT_MIN_REVIEWS, 1)?;
    println!(
        "\n2000 synthetic authors: {} tied, after filtering {:?}, {} per class kept",
        big.tied_authors, big.after_filter, big.per_class
    );
    Ok(())
}
