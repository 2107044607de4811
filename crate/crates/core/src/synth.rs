//! Deterministic synthetic data: a small Yelp-shaped corpus with matching
//! dependency parses, random author profiles, and marker-word documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::corpus::{
    filter_english, group_by_author, read_businesses, AuthorProfile, LanguageFilter, LanguageIdentifier, Review,
    ReviewReader,
};
use crate::error::{Error, Result};
use crate::features::{parse_conllu, ParsedCorpus};
use crate::labeling::{
    build_documents, label_and_balance, LabeledDocument, SilverLabel, DEFAULT_MIN_REVIEWS, NUM_CLASSES,
};

pub const FIXTURE_SEED: u64 = 20180;
pub const FIXTURE_AUTHORS: usize = 40;

/// Sentence templates as `form/UPOS/head/deprel` tokens. `{N}` and `{A}`
/// are filled from the class lexicon.
const TEMPLATES: [&[&str]; NUM_CLASSES] = [
    &[
        "{N}/NOUN/4/nsubj was/AUX/4/cop so/ADV/4/advmod {A}/ADJ/0/root !!!/PUNCT/4/punct",
        "love/VERB/0/root the/DET/3/det {N}/NOUN/1/obj here/ADV/1/advmod lol/INTJ/1/discourse",
        "cheap/ADJ/0/root and/CCONJ/3/cc {A}/ADJ/1/conj ,/PUNCT/7/punct will/AUX/7/aux be/AUX/7/cop back/ADV/1/parataxis !/PUNCT/1/punct",
    ],
    &[
        "The/DET/2/det {N}/NOUN/4/nsubj was/AUX/4/cop {A}/ADJ/0/root and/CCONJ/9/cc the/DET/7/det staff/NOUN/9/nsubj was/AUX/9/cop friendly/ADJ/4/conj ./PUNCT/4/punct",
        "We/PRON/2/nsubj ordered/VERB/0/root the/DET/4/det {N}/NOUN/2/obj for/ADP/7/case the/DET/7/det kids/NOUN/2/obl ./PUNCT/2/punct",
        "Good/ADJ/2/amod value/NOUN/0/root for/ADP/7/case a/DET/7/det {A}/ADJ/7/amod family/NOUN/7/compound dinner/NOUN/2/nmod ./PUNCT/2/punct",
    ],
    &[
        "The/DET/3/det {A}/ADJ/3/amod {N}/NOUN/4/nsubj paired/VERB/0/root nicely/ADV/4/advmod with/ADP/8/case a/DET/8/det glass/NOUN/4/obl of/ADP/10/case wine/NOUN/8/nmod ./PUNCT/4/punct",
        "Our/PRON/2/nmod:poss server/NOUN/3/nsubj recommended/VERB/0/root the/DET/5/det {N}/NOUN/3/obj ,/PUNCT/9/punct which/PRON/9/nsubj was/AUX/9/cop {A}/ADJ/5/acl:relcl ./PUNCT/3/punct",
        "Reservations/NOUN/3/nsubj:pass are/AUX/3/aux:pass recommended/VERB/0/root on/ADP/5/case weekends/NOUN/3/obl ./PUNCT/3/punct",
    ],
    &[
        "The/DET/3/det tasting/NOUN/3/compound menu/NOUN/4/nsubj showcased/VERB/0/root an/DET/8/det extraordinarily/ADV/7/advmod {A}/ADJ/8/amod {N}/NOUN/4/obj ,/PUNCT/11/punct impeccably/ADV/11/advmod presented/VERB/8/acl by/ADP/14/case the/DET/14/det sommelier/NOUN/11/obl ./PUNCT/4/punct",
        "Although/SCONJ/6/mark the/DET/3/det ambiance/NOUN/6/nsubj was/AUX/6/cop somewhat/ADV/6/advmod pretentious/ADJ/12/advcl ,/PUNCT/12/punct the/DET/9/det {N}/NOUN/12/nsubj was/AUX/12/cop undeniably/ADV/12/advmod {A}/ADJ/0/root ./PUNCT/12/punct",
        "Their/PRON/3/nmod:poss meticulous/ADJ/3/amod attention/NOUN/8/nsubj to/ADP/6/case seasonal/ADJ/6/amod ingredients/NOUN/3/nmod is/AUX/8/cop remarkable/ADJ/0/root ./PUNCT/8/punct",
    ],
];

/// Sentences any author may write.
const SHARED: &[&str] = &[
    "The/DET/2/det place/NOUN/4/nsubj was/AUX/4/cop busy/ADJ/0/root ./PUNCT/4/punct",
    "We/PRON/2/nsubj came/VERB/0/root here/ADV/2/advmod with/ADP/5/case friends/NOUN/2/obl ./PUNCT/2/punct",
];

const NOUNS: [&[&str]; NUM_CLASSES] = [
    &["burger", "taco", "pizza", "fries", "wings", "burrito"],
    &["pasta", "sandwich", "salad", "curry", "noodles", "omelette"],
    &["salmon", "risotto", "lamb", "gnocchi", "scallops", "duck"],
    &["tartare", "caviar", "wagyu", "lobster", "truffle", "souffle"],
];

const ADJECTIVES: [&[&str]; NUM_CLASSES] = [
    &["good", "tasty", "greasy", "huge", "yummy", "hot"],
    &["fresh", "decent", "solid", "generous", "warm", "nice"],
    &["delicate", "flavorful", "tender", "balanced", "crisp", "rich"],
    &["exquisite", "sublime", "luxurious", "impeccable", "elegant", "ethereal"],
];

const FRENCH_REVIEW: &str = "Nous avons mangé une excellente pizza dans ce petit restaurant, \
    le service était rapide et les prix sont vraiment raisonnables pour le quartier.";

const BUSINESSES_PER_CLASS: usize = 3;
const UNPRICED_BUSINESS: &str = "biz_unpriced";

#[derive(Debug, Clone)]
struct Token {
    form: String,
    upos: &'static str,
    head: usize,
    deprel: &'static str,
}

fn fill(template: &'static str, style: usize, rng: &mut ChaCha8Rng) -> Vec<Token> {
    let noun = *NOUNS[style].choose(rng).expect("nouns");
    let adj = *ADJECTIVES[style].choose(rng).expect("adjectives");
    template
        .split(' ')
        .map(|entry| {
            let mut parts = entry.rsplitn(4, '/');
            let deprel = parts.next().expect("deprel");
            let head = parts.next().expect("head").parse().expect("head index");
            let upos = parts.next().expect("upos");
            let form = parts.next().expect("form").replace("{N}", noun).replace("{A}", adj);
            Token {
                form,
                upos,
                head,
                deprel,
            }
        })
        .collect()
}

fn render(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        if !out.is_empty() && t.upos != "PUNCT" {
            out.push(' ');
        }
        out.push_str(&t.form);
    }
    out
}

/// Where an author's reviews go: counts per price class, plus the style
/// they write in.
#[derive(Debug, Clone)]
struct Role {
    visits: [usize; NUM_CLASSES],
    style: usize,
    french: bool,
    unpriced: bool,
}

fn role(visits: [usize; NUM_CLASSES], style: usize) -> Role {
    Role {
        visits,
        style,
        french: false,
        unpriced: false,
    }
}

fn one_class(class: usize, n: usize) -> [usize; NUM_CLASSES] {
    let mut v = [0; NUM_CLASSES];
    v[class] = n;
    v
}

fn fixture_roles(rng: &mut ChaCha8Rng) -> Vec<Role> {
    let mut roles = Vec::new();
    // Consistent authors: unequal class sizes so balancing has work to do.
    for (class, pure) in [8, 7, 7, 6].into_iter().enumerate() {
        for i in 0..pure {
            let mut r = role(one_class(class, rng.random_range(10..=12)), class);
            r.french = class == 0 && i == 0;
            r.unpriced = class == 1 && i == 0;
            roles.push(r);
        }
        // One off-class visit gives a low but non-zero entropy.
        let mut visits = one_class(class, 11);
        visits[(class + 1) % NUM_CLASSES] = 1;
        roles.push(role(visits, class));
    }
    roles.push(role([4, 3, 3, 2], 0));
    roles.push(role([3, 4, 3, 2], 1));
    roles.push(role([2, 3, 3, 4], 3));
    roles.push(role([2, 0, 2, 0], 0));
    roles.push(role(one_class(2, 5), 2));
    roles.push(role(one_class(3, 5), 3));
    roles.push(role(one_class(0, 1), 0));
    roles.push(role(one_class(1, 1), 1));
    debug_assert_eq!(roles.len(), FIXTURE_AUTHORS);
    roles
}

struct DraftReview {
    user: usize,
    business: String,
    sentences: Vec<Vec<Token>>,
    text: String,
    english_priced: bool,
}

/// Contents of the three fixture files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureFiles {
    pub reviews: String,
    pub businesses: String,
    pub conllu: String,
}

/// Builds the synthetic corpus: 40 authors writing in four class styles,
/// including noisy, tied, sparse and single-review authors, one French
/// review, one review of an unpriced business, one malformed review line,
/// one out-of-range price and one conflicting duplicate business.
pub fn fixture(seed: u64) -> FixtureFiles {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roles = fixture_roles(&mut rng);
    roles.shuffle(&mut rng);

    let biz = |class: usize, i: usize| format!("biz_{}_{}", "pmhl".as_bytes()[class] as char, i);
    let mut drafts = Vec::new();
    for (user, r) in roles.iter().enumerate() {
        for (class, &n) in r.visits.iter().enumerate() {
            for _ in 0..n {
                let n_sent = rng.random_range(2..=3);
                let sentences: Vec<Vec<Token>> = (0..n_sent)
                    .map(|_| {
                        let t = if rng.random_bool(0.2) {
                            *SHARED.choose(&mut rng).expect("shared")
                        } else {
                            *TEMPLATES[r.style].choose(&mut rng).expect("templates")
                        };
                        fill(t, r.style, &mut rng)
                    })
                    .collect();
                let text = sentences.iter().map(|s| render(s)).collect::<Vec<_>>().join(" ");
                drafts.push(DraftReview {
                    user,
                    business: biz(class, rng.random_range(0..BUSINESSES_PER_CLASS)),
                    sentences,
                    text,
                    english_priced: true,
                });
            }
        }
        if r.french {
            drafts.push(DraftReview {
                user,
                business: biz(0, 0),
                sentences: Vec::new(),
                text: FRENCH_REVIEW.to_string(),
                english_priced: false,
            });
        }
        if r.unpriced {
            let tokens = fill(TEMPLATES[r.style][0], r.style, &mut rng);
            drafts.push(DraftReview {
                user,
                business: UNPRICED_BUSINESS.to_string(),
                text: render(&tokens),
                sentences: Vec::new(),
                english_priced: false,
            });
        }
    }
    drafts.shuffle(&mut rng);

    let user_id = |u: usize| format!("user_{:02}", u + 1);
    let mut reviews = String::new();
    for (pos, d) in drafts.iter().enumerate() {
        if pos == drafts.len() / 2 {
            reviews.push_str("{\"user_id\":\"user_99\",\"text\":\"missing ids\"}\n");
        }
        let line = json!({
            "review_id": format!("rev_{:04}", pos + 1),
            "user_id": user_id(d.user),
            "business_id": d.business,
            "stars": 1 + (pos % 5),
            "text": d.text,
        });
        reviews.push_str(&line.to_string());
        reviews.push('\n');
    }

    let mut businesses = String::new();
    for class in 0..NUM_CLASSES {
        for i in 0..BUSINESSES_PER_CLASS {
            let price = if (class + i) % 2 == 0 {
                json!((class + 1).to_string())
            } else {
                json!(class + 1)
            };
            let line = json!({
                "business_id": biz(class, i),
                "categories": "Restaurants",
                "attributes": { "RestaurantsPriceRange2": price },
            });
            businesses.push_str(&line.to_string());
            businesses.push('\n');
        }
    }
    for line in [
        json!({ "business_id": UNPRICED_BUSINESS, "categories": "Restaurants", "attributes": null }),
        json!({ "business_id": "biz_odd", "attributes": { "RestaurantsPriceRange2": "5" } }),
        json!({ "business_id": biz(2, 0), "attributes": { "RestaurantsPriceRange2": "1" } }),
    ] {
        businesses.push_str(&line.to_string());
        businesses.push('\n');
    }

    let mut by_user: BTreeMap<String, Vec<&DraftReview>> = BTreeMap::new();
    for d in drafts.iter().filter(|d| d.english_priced) {
        by_user.entry(user_id(d.user)).or_default().push(d);
    }
    let mut conllu = String::new();
    for (user, docs) in &by_user {
        let _ = writeln!(conllu, "# doc_id = {user}");
        let mut n = 0;
        for d in docs {
            for s in &d.sentences {
                n += 1;
                let _ = writeln!(conllu, "# sent_id = {user}-{n}");
                let _ = writeln!(conllu, "# text = {}", render(s));
                for (i, t) in s.iter().enumerate() {
                    let _ = writeln!(
                        conllu,
                        "{}\t{}\t_\t{}\t_\t_\t{}\t{}\t_\t_",
                        i + 1,
                        t.form,
                        t.upos,
                        t.head,
                        t.deprel
                    );
                }
                conllu.push('\n');
            }
        }
    }

    FixtureFiles {
        reviews,
        businesses,
        conllu,
    }
}

/// Writes `reviews.jsonl`, `businesses.jsonl` and `parses.conllu` into `dir`.
pub fn write_fixture(dir: &Path, seed: u64) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = fixture(seed);
    for (name, body) in [
        ("reviews.jsonl", &files.reviews),
        ("businesses.jsonl", &files.businesses),
        ("parses.conllu", &files.conllu),
    ] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// The fixture taken through ingestion and labeling in memory, with the
/// bundled language identifier and the default review floor. Returns the
/// balanced documents and the parses of every English review.
pub fn fixture_documents(seed: u64) -> Result<(Vec<LabeledDocument>, ParsedCorpus)> {
    let files = fixture(seed);
    let reviews = ReviewReader::new(files.reviews.as_bytes()).collect::<Result<Vec<_>>>()?;
    let (english, _) = filter_english(reviews, LanguageFilter::Detect, &LanguageIdentifier::bundled());
    let prices = read_businesses(files.businesses.as_bytes(), Path::new("businesses.jsonl"))?;
    let grouping = group_by_author(english, &prices);
    let (authors, _) = label_and_balance(&grouping.profiles, DEFAULT_MIN_REVIEWS, seed)?;
    let profiles = grouping.profiles.into_iter().map(|p| (p.user_id.clone(), p)).collect();
    let docs = build_documents(&authors, &profiles)?;
    let parses = parse_conllu(files.conllu.as_bytes(), Path::new("parses.conllu"), None)?;
    Ok((docs, parses))
}

/// Random author profiles with skewed class popularity and a mix of
/// consistent and noisy authors. Review texts are placeholders.
pub fn synthetic_profiles(n_authors: usize, seed: u64) -> Vec<AuthorProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let popularity = [0.4, 0.3, 0.2, 0.1];
    (0..n_authors)
        .map(|a| {
            let user_id = format!("author_{a:05}");
            let dominant = {
                let x: f64 = rng.random();
                let mut acc = 0.0;
                popularity
                    .iter()
                    .position(|p| {
                        acc += p;
                        x < acc
                    })
                    .unwrap_or(NUM_CLASSES - 1)
            };
            let loyalty: f64 = rng.random_range(0.3..1.0);
            let n = rng.random_range(2..=30);
            let mut label_counts = BTreeMap::new();
            let reviews = (0..n)
                .map(|i| {
                    let class = if rng.random_bool(loyalty) {
                        dominant
                    } else {
                        rng.random_range(0..NUM_CLASSES)
                    };
                    *label_counts.entry(class as u8 + 1).or_insert(0) += 1;
                    Review {
                        review_id: format!("{user_id}_r{i}"),
                        user_id: user_id.clone(),
                        business_id: format!("biz_{class}"),
                        text: format!("review {i}"),
                        order_key: format!("{:012}", a * 100 + i),
                        lang: None,
                    }
                })
                .collect();
            AuthorProfile {
                user_id,
                reviews,
                label_counts,
            }
        })
        .collect()
}

/// Balanced documents of shared filler words plus one marker word unique
/// to each class, repeated one to three times.
pub fn marker_documents(n_docs: usize, seed: u64) -> Vec<LabeledDocument> {
    const FILLER: &[&str] = &[
        "the", "food", "was", "and", "we", "had", "a", "table", "for", "two", "service", "place", "it", "really",
        "very", "dinner", "lunch", "menu", "came", "back", "again", "order", "with", "some", "friends", "night",
        "drinks", "dessert", "price", "staff",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|i| {
            let class = i % NUM_CLASSES;
            let mut words: Vec<String> = (0..rng.random_range(15..40))
                .map(|_| FILLER.choose(&mut rng).expect("filler").to_string())
                .collect();
            for _ in 0..rng.random_range(1..=3) {
                let at = rng.random_range(0..=words.len());
                words.insert(at, format!("marker{}", class + 1));
            }
            LabeledDocument {
                user_id: format!("doc_{i:04}"),
                label: SilverLabel::from_index(class),
                text: words.join(" ") + ".",
            }
        })
        .collect()
}
