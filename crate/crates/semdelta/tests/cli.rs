//! End-to-end runs of the `semdelta` binary against the committed fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn semdelta(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semdelta"))
        .args(args)
        .current_dir(dir)
        .env_remove("OPENAI_API_KEY")
        .output()
        .expect("spawn semdelta")
}

fn golden(name: &str) -> Vec<u8> {
    std::fs::read(fixtures().join(name)).unwrap()
}

const TINY: [&str; 6] = [
    "compare",
    "--human",
    "tiny_human.jsonl",
    "--ai",
    "tiny_ai.jsonl",
    "--lexicon",
];

#[test]
fn compare_matches_golden_in_every_format() {
    for (format, file) in [
        ("json", "tiny_report.json"),
        ("csv", "tiny_report.csv"),
        ("svg", "tiny_report.svg"),
    ] {
        let mut args = TINY.to_vec();
        args.extend(["lexicon.tsv", "--format", format]);
        let out = semdelta(&fixtures(), &args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout == golden(file), "{format} output drifted from {file}");
    }
}

#[test]
fn synthetic_report_matches_golden() {
    let out = semdelta(
        &fixtures(),
        &[
            "compare",
            "--human",
            "synthetic_human.jsonl",
            "--ai",
            "synthetic_ai.jsonl",
            "--lexicon",
            "lexicon.tsv",
            "--jobs",
            "3",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout == golden("synthetic_report.json"));
}

#[test]
fn csv_has_header_plus_one_row_per_record() {
    let csv = String::from_utf8(golden("tiny_report.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "id,label,source,top1,iv1,top2,iv2,delta,entropy_bits");
}

#[test]
fn output_flag_writes_only_the_declared_file() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["tiny_human.jsonl", "tiny_ai.jsonl", "lexicon.tsv"] {
        std::fs::copy(fixtures().join(f), dir.path().join(f)).unwrap();
    }
    let mut args = TINY.to_vec();
    args.extend(["lexicon.tsv", "--output", "report.json"]);
    let out = semdelta(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read(dir.path().join("report.json")).unwrap(),
        golden("tiny_report.json")
    );
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["lexicon.tsv", "report.json", "tiny_ai.jsonl", "tiny_human.jsonl"]
    );
}

#[test]
fn labeled_input_gives_same_numbers_as_split_flags() {
    let out = semdelta(
        &fixtures(),
        &[
            "analyze",
            "--input",
            "tiny_human.jsonl",
            "--label",
            "human",
            "--lexicon",
            "lexicon.tsv",
            "--format",
            "csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let golden = String::from_utf8(golden("tiny_report.csv")).unwrap();
    for line in text.lines().skip(1) {
        assert!(golden.contains(line), "{line}");
    }
}

#[test]
fn single_label_report_marks_welch_not_applicable() {
    let out = semdelta(
        &fixtures(),
        &[
            "analyze",
            "--input",
            "tiny_human.jsonl",
            "--label",
            "human",
            "--lexicon",
            "lexicon.tsv",
            "--format",
            "svg",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains("n/a"));
}

#[test]
fn missing_lexicon_flag_is_usage_error() {
    let out = semdelta(&fixtures(), &["analyze", "--input", "tiny_human.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn lexicon_validate_reports_sixteen_categories() {
    let out = semdelta(&fixtures(), &["lexicon-validate", "--lexicon", "lexicon.tsv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("16 categories"));
}

#[test]
fn data_errors_cite_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.jsonl"),
        "{\"text\": \"a cat\", \"label\": \"ai\"}\n{\"label\": \"ai\"}\n",
    )
    .unwrap();
    let out = semdelta(
        dir.path(),
        &["analyze", "--input", "bad.jsonl", "--lexicon", "builtin:test"],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.jsonl") && err.contains("line 2"), "{err}");

    std::fs::write(dir.path().join("lex.tsv"), "a\tcat\nbroken\n").unwrap();
    std::fs::write(
        dir.path().join("ok.jsonl"),
        "{\"text\": \"a cat\", \"label\": \"ai\"}\n",
    )
    .unwrap();
    let out = semdelta(dir.path(), &["analyze", "--input", "ok.jsonl", "--lexicon", "lex.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lex.tsv") && err.contains("line 2"), "{err}");
}

#[test]
fn all_skipped_corpus_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("none.jsonl"),
        "{\"text\": \"zzz qqq\", \"label\": \"ai\"}\n",
    )
    .unwrap();
    let out = semdelta(
        dir.path(),
        &["analyze", "--input", "none.jsonl", "--lexicon", "builtin:test"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn csv_and_plaintext_adapters() {
    let dir = tempfile::tempdir().unwrap();
    let adapter = dir.path().join("scenes.toml");
    std::fs::write(
        &adapter,
        "format = \"csv\"\ntext_column = \"line\"\ngroup_column = \"scene\"\nsource = \"scenes\"\n",
    )
    .unwrap();
    let out = semdelta(
        &fixtures(),
        &[
            "compare",
            "--human",
            "scenes.csv",
            "--ai",
            "tiny_ai.jsonl",
            "--lexicon",
            "lexicon.tsv",
            "--adapter",
            adapter.to_str().unwrap(),
            "--format",
            "csv",
        ],
    );
    // the csv adapter cannot read the jsonl file
    assert_eq!(out.status.code(), Some(2));

    let out = semdelta(
        &fixtures(),
        &[
            "analyze",
            "--input",
            "scenes.csv",
            "--label",
            "human",
            "--lexicon",
            "lexicon.tsv",
            "--adapter",
            adapter.to_str().unwrap(),
            "--format",
            "csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 2);

    let out = semdelta(
        &fixtures(),
        &[
            "analyze",
            "--input",
            "notes.txt",
            "--label",
            "human",
            "--lexicon",
            "lexicon.tsv",
            "--format",
            "csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 1);

    let out = semdelta(
        &fixtures(),
        &["analyze", "--input", "notes.txt", "--lexicon", "lexicon.tsv"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stub_generation_writes_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("gen.toml"),
        "model = \"stub\"\ntopics = [\"music\", \"travel\"]\nturns = 2\n",
    )
    .unwrap();
    let out = semdelta(
        dir.path(),
        &[
            "generate", "--config", "gen.toml", "--count", "3", "--stub", "--output", "ai.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let jsonl = std::fs::read_to_string(dir.path().join("ai.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 6);

    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("prompts/default_prompts.tsv");
    let out = semdelta(
        dir.path(),
        &[
            "generate",
            "--config",
            "gen.toml",
            "--prompts",
            bundled.to_str().unwrap(),
            "--stub",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    // three topic rows x 2 topics + three open rows
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 9);
}

#[test]
fn generation_without_key_fails_before_network() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("gen.toml"),
        "model = \"m\"\ntopics = [\"a\"]\nendpoint_url = \"http://192.0.2.1:9/v1/chat/completions\"\n",
    )
    .unwrap();
    let out = semdelta(dir.path(), &["generate", "--config", "gen.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OPENAI_API_KEY"));
}
