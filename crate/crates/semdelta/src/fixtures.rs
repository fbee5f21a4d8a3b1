//! Deterministic synthetic corpora.
//!
//! The real dialogue datasets are not redistributable, so the repository
//! ships generated stand-ins. "AI-like" records dwell on one theme per
//! dialogue; "human-like" records drift between themes from sentence to
//! sentence. Both are built from the bundled test lexicon plus filler words
//! that match no category, with a seeded ChaCha stream so the bytes never
//! change between runs or platforms.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semdelta_core::{builtin_test_lexicon, record_id, DialogueRecord, Label, Lexicon};

use crate::corpus::to_jsonl;

pub const DEFAULT_SEED: u64 = 20_250_917;
pub const AI_RECORDS: usize = 40;
pub const HUMAN_RECORDS: usize = 60;

/// Words guaranteed to match no category of the test lexicon.
pub const FILLER: &[&str] = &[
    "the",
    "a",
    "we",
    "they",
    "really",
    "about",
    "then",
    "just",
    "and",
    "some",
    "was",
    "it",
    "so",
    "very",
    "maybe",
    "think",
    "talked",
    "said",
    "again",
    "there",
    "with",
    "of",
    "to",
    "on",
    "honestly",
    "kind",
    "yesterday",
    "remember",
    "that",
    "you",
    "i",
    "know",
    "well",
    "oh",
    "yeah",
    "also",
];

const SPEAKERS: [&str; 2] = ["A", "B"];

fn spoken(term: &str) -> String {
    term.replace('_', " ")
}

fn sentence(rng: &mut ChaCha8Rng, terms: &[&str]) -> String {
    let mut words: Vec<String> = Vec::new();
    for t in terms {
        for _ in 0..rng.random_range(1u32..4) {
            words.push((*FILLER.choose(rng).expect("filler")).to_string());
        }
        words.push(spoken(t));
    }
    for _ in 0..rng.random_range(0u32..3) {
        words.push((*FILLER.choose(rng).expect("filler")).to_string());
    }
    let mut s = words.join(" ");
    if let Some(first) = s.get(0..1) {
        s.replace_range(0..1, &first.to_uppercase());
    }
    s.push('.');
    s
}

fn terms_of(lex: &Lexicon, cat: usize) -> Vec<&str> {
    lex.categories()[cat].terms.iter().map(String::as_str).collect()
}

fn dialogue(lines: Vec<String>) -> String {
    lines
        .into_iter()
        .enumerate()
        .map(|(i, l)| format!("{}: {l}", SPEAKERS[i % 2]))
        .collect::<Vec<_>>()
        .join("\n")
}

/// One theme per dialogue, with an occasional stray term from elsewhere.
fn ai_like(rng: &mut ChaCha8Rng, lex: &Lexicon) -> String {
    let focus = rng.random_range(0..lex.len() as u32) as usize;
    let focus_terms = terms_of(lex, focus);
    let turns = rng.random_range(4u32..7);
    let lines = (0..turns)
        .map(|_| {
            let mut picked: Vec<&str> = (0..2).map(|_| *focus_terms.choose(rng).expect("terms")).collect();
            if rng.random_bool(0.25) {
                let other = rng.random_range(0..lex.len() as u32) as usize;
                picked.push(*terms_of(lex, other).choose(rng).expect("terms"));
            }
            sentence(rng, &picked)
        })
        .collect();
    dialogue(lines)
}

/// Every sentence picks its own theme.
fn human_like(rng: &mut ChaCha8Rng, lex: &Lexicon) -> String {
    let turns = rng.random_range(4u32..7);
    let lines = (0..turns)
        .map(|_| {
            let picked: Vec<&str> = (0..2)
                .map(|_| {
                    let cat = rng.random_range(0..lex.len() as u32) as usize;
                    *terms_of(lex, cat).choose(rng).expect("terms")
                })
                .collect();
            sentence(rng, &picked)
        })
        .collect();
    dialogue(lines)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub ai: Vec<DialogueRecord>,
    pub human: Vec<DialogueRecord>,
}

/// 40 AI-like and 60 human-like records from `seed`.
pub fn synthetic_corpus(seed: u64) -> SyntheticCorpus {
    let lex = builtin_test_lexicon();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ai = (0..AI_RECORDS)
        .map(|i| {
            DialogueRecord::new(
                record_id("synthetic-ai", i),
                Label::Ai,
                "synthetic-ai",
                ai_like(&mut rng, &lex),
            )
        })
        .collect();
    let human = (0..HUMAN_RECORDS)
        .map(|i| {
            DialogueRecord::new(
                record_id("synthetic-human", i),
                Label::Human,
                "synthetic-human",
                human_like(&mut rng, &lex),
            )
        })
        .collect();
    SyntheticCorpus { ai, human }
}

/// Four short records whose scores are easy to trace by hand against the
/// test lexicon.
pub fn tiny_corpus() -> SyntheticCorpus {
    let rec = |id: &str, label, text: &str| DialogueRecord::new(id, label, "tiny", text);
    SyntheticCorpus {
        human: vec![
            rec("h1", Label::Human, "The cat chased the dog, then we went for a run."),
            rec("h2", Label::Human, "Rain and snow ruined our trip to the beach."),
        ],
        ai: vec![
            rec(
                "a1",
                Label::Ai,
                "The computer runs software and a robot learns an algorithm from data.",
            ),
            rec(
                "a2",
                Label::Ai,
                "The guitar and piano played a song at the concert with the band.",
            ),
        ],
    }
}

const SCENES_CSV: &str = "\
scene,speaker,line
1,Ann,Did you feed the cat before the storm?
1,Ben,\"Yes, and I walked the dog in the rain.\"
2,Ann,My boss moved the meeting again.
2,Ben,At least the salary is fine.
2,Ann,\"I would rather be on a beach, honestly.\"
";

const NOTES_TXT: &str = "\
We took the train to the coast.
The hotel was small but the beach was lovely.

It rained on the second day so we read a book.
Dinner was soup and bread.
";

/// Every committed fixture file as (relative path, contents).
pub fn fixture_files() -> Vec<(&'static str, String)> {
    let big = synthetic_corpus(DEFAULT_SEED);
    let tiny = tiny_corpus();
    vec![
        ("lexicon.tsv", builtin_test_lexicon().to_tsv()),
        ("synthetic_ai.jsonl", to_jsonl(&big.ai)),
        ("synthetic_human.jsonl", to_jsonl(&big.human)),
        ("tiny_ai.jsonl", to_jsonl(&tiny.ai)),
        ("tiny_human.jsonl", to_jsonl(&tiny.human)),
        ("scenes.csv", SCENES_CSV.to_string()),
        ("notes.txt", NOTES_TXT.to_string()),
    ]
}
