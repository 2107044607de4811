//! Trigram language identification and the English filter applied at ingestion.
//!
//! ```text
//! cargo run --example language_id -- "Texto opcional para identificar"
//! ```

use socvar::corpus::{filter_english, LanguageFilter, LanguageIdentifier, Review};

fn main() {
    let identifier = LanguageIdentifier::bundled();
    let mut samples: Vec<String> = vec![
        "The brisket was smoky and the staff could not have been friendlier.".into(),
        "Le service était lent mais les plats étaient délicieux.".into(),
        "Die Portionen waren riesig und das Bier war kalt.".into(),
        "La comida estaba muy rica y el precio era justo.".into(),
        "Good.".into(),
    ];
    samples.extend(std::env::args().skip(1));

    println!("{:<6} {:>8}  text", "lang", "distance");
    for text in &samples {
        let (lang, distance) = identifier.detect(text);
        println!("{lang:<6} {distance:>8.3}  {text}");
    }

    let reviews = samples.iter().enumerate().map(|(i, text)| Review {
        review_id: format!("r{i}"),
        user_id: "u1".into(),
        business_id: "b1".into(),
        text: text.clone(),
        order_key: format!("{i:012}"),
        lang: None,
    });
    let (kept, tally) = filter_english(reviews, LanguageFilter::Detect, &identifier);
    println!(
        "\nkept {} of {}: {} non-English dropped, {} too short to call",
        kept.len(),
        samples.len(),
        tally.non_english,
        tally.undetermined
    );
}
