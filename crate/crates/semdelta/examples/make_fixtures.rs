//! Regenerate everything under `fixtures/`.
//!
//! cargo run -p semdelta --example make_fixtures

use std::path::Path;

use semdelta::cli::{run, EXIT_OK};
use semdelta::fixtures::fixture_files;

/// Golden reports: (file name, CLI arguments after `compare`).
pub const GOLDEN: &[(&str, &[&str])] = &[
    (
        "tiny_report.json",
        &[
            "--human",
            "tiny_human.jsonl",
            "--ai",
            "tiny_ai.jsonl",
            "--format",
            "json",
        ],
    ),
    (
        "tiny_report.csv",
        &[
            "--human",
            "tiny_human.jsonl",
            "--ai",
            "tiny_ai.jsonl",
            "--format",
            "csv",
        ],
    ),
    (
        "tiny_report.svg",
        &[
            "--human",
            "tiny_human.jsonl",
            "--ai",
            "tiny_ai.jsonl",
            "--format",
            "svg",
        ],
    ),
    (
        "synthetic_report.json",
        &[
            "--human",
            "synthetic_human.jsonl",
            "--ai",
            "synthetic_ai.jsonl",
            "--format",
            "json",
        ],
    ),
];

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).expect("create fixtures dir");
    for (name, contents) in fixture_files() {
        std::fs::write(dir.join(name), contents).expect("write fixture");
        println!("wrote {name}");
    }
    // relative paths keep the report headers free of machine-specific prefixes
    std::env::set_current_dir(&dir).expect("enter fixtures dir");
    for (name, args) in GOLDEN {
        let argv = ["semdelta", "compare", "--lexicon", "lexicon.tsv"]
            .iter()
            .chain(args.iter());
        let mut out = Vec::new();
        let code = run(argv, &mut out, &mut std::io::stderr());
        assert_eq!(code, EXIT_OK, "{name}");
        std::fs::write(name, out).expect("write golden");
        println!("wrote {name}");
    }
}
