//! Bleached tokens hide the word but keep its shape, length, character
//! classes and how common it was in training.

use socvar::features::{bleach_token_with, tokenize, FrequencyField, TokenFrequencies};

fn main() {
    let training = "I love this place ! I really love the pizza and the pizza loves me back ! ! !";
    let freqs = TokenFrequencies::count(tokenize(training));
    let review = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "I LOVE the pizza at Luigi's!!! 10/10".into());

    println!("{:<12} {:<34} log10 bucket", "token", "raw frequency");
    for token in tokenize(&review) {
        let f = freqs.get(&token);
        println!(
            "{token:<12} {:<34} {}",
            bleach_token_with(&token, f, FrequencyField::Raw),
            bleach_token_with(&token, f, FrequencyField::Log10Bucket)
        );
    }
}
