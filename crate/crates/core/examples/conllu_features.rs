//! Reads dependency parses and turns one document into the two syntactic
//! representations: the UPOS sequence and POS/relation/head triplets.

use socvar::features::{dep_triplets, parse_conllu, pos_sequence};
use socvar::synth::{fixture, FIXTURE_SEED};

fn main() -> socvar::Result<()> {
    let conllu = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).map_err(|e| socvar::Error::Config(format!("{path}: {e}")))?,
        None => fixture(FIXTURE_SEED).conllu,
    };
    let corpus = parse_conllu(conllu.as_bytes(), std::path::Path::new("input.conllu"), None)?;
    println!(
        "{} documents, {} sentences",
        corpus.len(),
        corpus.values().map(Vec::len).sum::<usize>()
    );

    let (doc_id, sentences) = corpus.iter().next().expect("at least one document");
    let first = &sentences[0];
    println!("\ndocument {doc_id}, first sentence:");
    for t in &first.tokens {
        println!(
            "  {:<14} {:<6} head {:>2} {}",
            t.form,
            t.upos.as_str(),
            t.head,
            t.deprel
        );
    }
    let pos = pos_sequence(std::slice::from_ref(first));
    let triples = dep_triplets(std::slice::from_ref(first))?;
    println!("\nPOS:      {}", pos.join(" "));
    println!("triplets: {}", triples.join(" "));
    Ok(())
}
