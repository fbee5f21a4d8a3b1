//! Corpus adapters: JSONL, CSV and plain text into [`DialogueRecord`]s.
//!
//! The unit of analysis matters for the delta, so it is always explicit:
//! one JSONL object, one CSV row or group of rows sharing `group_column`,
//! or a fixed window of non-empty plaintext lines.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use semdelta_core::record::UnknownLabel;
use semdelta_core::{record_id, DialogueRecord, Label};

pub const DEFAULT_WINDOW_LINES: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("input is not valid UTF-8 (byte offset {offset})")]
    NotUtf8 { offset: usize },
    #[error("CSV header has no column {0:?}")]
    MissingColumn(String),
    #[error("line {line}: {reason}")]
    MalformedJsonLine { line: usize, reason: String },
    #[error("record {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
    #[error("line {line}: no label in record and none configured")]
    MissingLabel { line: usize },
    #[error("duplicate record id {id:?} (line {line})")]
    DuplicateId { id: String, line: usize },
    #[error("corpus produced no records")]
    EmptyCorpus,
    #[error("invalid adapter config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
    Plaintext,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Jsonl => "jsonl",
            Format::Csv => "csv",
            Format::Plaintext => "plaintext",
        }
    }

    /// Guess from a file extension: `.jsonl`/`.ndjson`, `.csv`, anything else
    /// is plain text.
    pub fn from_path(path: &Path) -> Format {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("jsonl" | "ndjson") => Format::Jsonl,
            Some("csv") => Format::Csv,
            _ => Format::Plaintext,
        }
    }
}

/// How to cut one input into records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterConfig {
    pub format: Format,
    #[serde(default)]
    pub text_column: Option<String>,
    #[serde(default)]
    pub group_column: Option<String>,
    #[serde(default = "default_window")]
    pub window_lines: usize,
    /// Overrides any per-record label. Required for CSV and plain text.
    #[serde(default, with = "opt_label")]
    pub label: Option<Label>,
    pub source: String,
}

fn default_window() -> usize {
    DEFAULT_WINDOW_LINES
}

impl AdapterConfig {
    pub fn new(format: Format, label: Option<Label>, source: impl Into<String>) -> Self {
        AdapterConfig {
            format,
            text_column: None,
            group_column: None,
            window_lines: DEFAULT_WINDOW_LINES,
            label,
            source: source.into(),
        }
    }

    /// Parse adapter settings. The label may be left out here and supplied
    /// later (from the command line); everything else is checked now.
    pub fn from_toml(text: &str) -> Result<Self, CorpusError> {
        let cfg: AdapterConfig = toml::from_str(text).map_err(|e| CorpusError::InvalidConfig(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }

    fn check_shape(&self) -> Result<(), CorpusError> {
        let bad = |m: &str| Err(CorpusError::InvalidConfig(m.to_string()));
        if self.window_lines == 0 {
            return bad("window_lines must be at least 1");
        }
        if self.source.trim().is_empty() {
            return bad("source must not be empty");
        }
        match self.format {
            Format::Csv if self.text_column.is_none() => bad("csv input needs text_column"),
            Format::Jsonl | Format::Plaintext if self.text_column.is_some() || self.group_column.is_some() => {
                bad("text_column and group_column apply to csv only")
            }
            _ => Ok(()),
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        self.check_shape()?;
        if self.format != Format::Jsonl && self.label.is_none() {
            return Err(CorpusError::InvalidConfig(
                "csv and plaintext inputs need a label".into(),
            ));
        }
        Ok(())
    }

    /// Flat description for report headers.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("format".into(), self.format.as_str().into());
        m.insert("source".into(), self.source.clone());
        if let Some(l) = self.label {
            m.insert("label".into(), l.to_string());
        }
        match self.format {
            Format::Csv => {
                m.insert("text_column".into(), self.text_column.clone().unwrap_or_default());
                if let Some(g) = &self.group_column {
                    m.insert("group_column".into(), g.clone());
                }
            }
            Format::Plaintext => {
                m.insert("window_lines".into(), self.window_lines.to_string());
            }
            Format::Jsonl => {}
        }
        m
    }
}

mod opt_label {
    use semdelta_core::Label;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(label: &Option<Label>, s: S) -> Result<S::Ok, S::Error> {
        match label {
            Some(l) => s.serialize_some(l.as_str()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Label>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Read `source` according to `config`.
pub fn ingest(source: &[u8], config: &AdapterConfig) -> Result<Vec<DialogueRecord>, CorpusError> {
    config.validate()?;
    let text = std::str::from_utf8(source).map_err(|e| CorpusError::NotUtf8 {
        offset: e.valid_up_to(),
    })?;
    let records = match config.format {
        Format::Jsonl => ingest_jsonl(text, config)?,
        Format::Csv => ingest_csv(text, config)?,
        Format::Plaintext => ingest_plaintext(text, config),
    };
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(records)
}

fn ingest_jsonl(text: &str, config: &AdapterConfig) -> Result<Vec<DialogueRecord>, CorpusError> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: String| CorpusError::MalformedJsonLine { line: line_no, reason };
        let value: Value = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| malformed("expected a JSON object".into()))?;
        let text = match obj.get("text") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(malformed("\"text\" must be a string".into())),
            None => return Err(malformed("missing \"text\"".into())),
        };
        if text.trim().is_empty() {
            return Err(malformed("\"text\" is empty".into()));
        }
        let label = match (config.label, obj.get("label")) {
            (Some(l), _) => l,
            (None, Some(Value::String(s))) => s.parse().map_err(|e: UnknownLabel| malformed(e.to_string()))?,
            (None, Some(_)) => return Err(malformed("\"label\" must be a string".into())),
            (None, None) => return Err(CorpusError::MissingLabel { line: line_no }),
        };
        let id = match obj.get("id") {
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            None | Some(Value::Null) => record_id(&config.source, out.len()),
            Some(_) => return Err(malformed("\"id\" must be a non-empty string".into())),
        };
        let meta = match obj.get("meta") {
            None | Some(Value::Null) => BTreeMap::new(),
            Some(Value::Object(m)) => m
                .iter()
                .map(|(k, v)| {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    (k.clone(), v)
                })
                .collect(),
            Some(_) => return Err(malformed("\"meta\" must be an object".into())),
        };
        if !ids.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { id, line: line_no });
        }
        out.push(DialogueRecord {
            id,
            label,
            source: config.source.clone(),
            text,
            meta,
        });
    }
    Ok(out)
}

fn ingest_csv(text: &str, config: &AdapterConfig) -> Result<Vec<DialogueRecord>, CorpusError> {
    let label = config.label.expect("validated");
    let text_col = config.text_column.as_deref().expect("validated");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::MalformedCsv {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let text_idx = find(text_col)?;
    let group_idx = config.group_column.as_deref().map(find).transpose()?;

    // group key -> lines, in order of first appearance
    let mut groups: IndexMap<String, Vec<String>> = IndexMap::new();
    for (row_no, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CorpusError::MalformedCsv {
            line: e.position().map_or(row_no + 2, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let cell = row.get(text_idx).unwrap_or_default();
        let key = match group_idx {
            Some(g) => row.get(g).unwrap_or_default().to_string(),
            None => row_no.to_string(),
        };
        let lines = groups.entry(key).or_default();
        if !cell.trim().is_empty() {
            lines.push(cell.to_string());
        }
    }

    let mut out = Vec::new();
    for (key, lines) in groups {
        if lines.is_empty() {
            continue;
        }
        let mut rec = DialogueRecord::new(
            record_id(&config.source, out.len()),
            label,
            &config.source,
            lines.join("\n"),
        );
        if let Some(g) = &config.group_column {
            rec.meta.insert(g.clone(), key);
        }
        out.push(rec);
    }
    Ok(out)
}

fn ingest_plaintext(text: &str, config: &AdapterConfig) -> Vec<DialogueRecord> {
    let label = config.label.expect("validated");
    let kept: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .collect();
    kept.chunks(config.window_lines)
        .enumerate()
        .map(|(i, chunk)| DialogueRecord::new(record_id(&config.source, i), label, &config.source, chunk.join("\n")))
        .collect()
}

/// Write records as JSONL in the schema [`ingest`] reads.
pub fn to_jsonl(records: &[DialogueRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let mut obj = serde_json::Map::new();
        obj.insert("id".into(), Value::String(r.id.clone()));
        obj.insert("label".into(), Value::String(r.label.to_string()));
        obj.insert("text".into(), Value::String(r.text.clone()));
        if !r.meta.is_empty() {
            let meta = r
                .meta
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect();
            obj.insert("meta".into(), Value::Object(meta));
        }
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(window: usize) -> AdapterConfig {
        AdapterConfig {
            window_lines: window,
            ..AdapterConfig::new(Format::Plaintext, Some(Label::Human), "shakespeare")
        }
    }

    fn csv_cfg(group: Option<&str>) -> AdapterConfig {
        AdapterConfig {
            text_column: Some("line".into()),
            group_column: group.map(String::from),
            ..AdapterConfig::new(Format::Csv, Some(Label::Human), "friends")
        }
    }

    #[test]
    fn plaintext_windows() {
        let src: String = (1..=10).map(|i| format!("line {i}\n")).collect();
        let recs = ingest(src.as_bytes(), &plain(4)).unwrap();
        let sizes: Vec<usize> = recs.iter().map(|r| r.text.lines().count()).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        assert_eq!(recs[0].id, "shakespeare-000000");
        assert_eq!(recs[2].id, "shakespeare-000002");
        assert_eq!(recs[2].text, "line 9\nline 10");
    }

    #[test]
    fn plaintext_skips_blank_lines_and_crlf() {
        let recs = ingest(b"a\r\n\r\n  \nb\r\nc", &plain(2)).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].text, "a\nb");
        assert_eq!(recs[1].text, "c");
    }

    #[test]
    fn csv_single_group_collapses() {
        let src = "scene,speaker,line\n1,Ross,We were on a break!\n1,Rachel,Were we?\n1,Joey,How you doin'\n";
        let recs = ingest(src.as_bytes(), &csv_cfg(Some("scene"))).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].text, "We were on a break!\nWere we?\nHow you doin'");
        assert_eq!(recs[0].meta["scene"], "1");
    }

    #[test]
    fn csv_groups_keep_first_appearance_order() {
        let src = "scene,line\nb,one\na,two\nb,three\n";
        let recs = ingest(src.as_bytes(), &csv_cfg(Some("scene"))).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].text, "one\nthree");
        assert_eq!(recs[1].text, "two");
    }

    #[test]
    fn csv_rows_without_group_and_quoting() {
        let src = "id,line\n1,\"Hello, world\"\n2,\"multi\nline\"\n3,\n";
        let recs = ingest(src.as_bytes(), &csv_cfg(None)).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].text, "Hello, world");
        assert_eq!(recs[1].text, "multi\nline");
        assert_eq!(recs[1].id, "friends-000001");
    }

    #[test]
    fn csv_missing_column() {
        let err = ingest(b"a,b\n1,2\n", &csv_cfg(None)).unwrap_err();
        assert!(matches!(err, CorpusError::MissingColumn(c) if c == "line"));
        let err = ingest(b"line,b\n1,2\n", &csv_cfg(Some("scene"))).unwrap_err();
        assert!(matches!(err, CorpusError::MissingColumn(c) if c == "scene"));
    }

    #[test]
    fn csv_ragged_row_cites_line() {
        let err = ingest(b"line,b\nx,1\ny,2,3\n", &csv_cfg(None)).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedCsv { line: 3, .. }), "{err}");
    }

    #[test]
    fn jsonl_records() {
        let src = concat!(
            "{\"id\":\"r1\",\"label\":\"ai\",\"text\":\"hello\",\"meta\":{\"model\":\"m\",\"turns\":3}}\n",
            "\n",
            "{\"text\":\"second\",\"label\":\"human\"}\n",
        );
        let cfg = AdapterConfig::new(Format::Jsonl, None, "mixed");
        let recs = ingest(src.as_bytes(), &cfg).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "r1");
        assert_eq!(recs[0].label, Label::Ai);
        assert_eq!(recs[0].meta["turns"], "3");
        assert_eq!(recs[1].id, "mixed-000001");
        assert_eq!(recs[1].label, Label::Human);

        // configured label wins
        let forced = AdapterConfig::new(Format::Jsonl, Some(Label::Human), "mixed");
        assert!(ingest(src.as_bytes(), &forced)
            .unwrap()
            .iter()
            .all(|r| r.label == Label::Human));
    }

    #[test]
    fn jsonl_errors_cite_line() {
        let cfg = AdapterConfig::new(Format::Jsonl, Some(Label::Ai), "g");
        let err = ingest(b"{\"text\":\"ok\"}\n{\"txt\":\"oops\"}\n", &cfg).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedJsonLine { line: 2, .. }), "{err}");
        let err = ingest(b"{\"text\":\"ok\"}\nnot json\n", &cfg).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedJsonLine { line: 2, .. }));
        let err = ingest(b"{\"text\":\"  \"}\n", &cfg).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedJsonLine { line: 1, .. }));
        let unlabeled = AdapterConfig::new(Format::Jsonl, None, "g");
        let err = ingest(b"{\"text\":\"x\"}\n", &unlabeled).unwrap_err();
        assert!(matches!(err, CorpusError::MissingLabel { line: 1 }));
        let err = ingest(b"{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n", &cfg).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn empty_and_invalid_inputs() {
        assert!(matches!(ingest(b"\n\n", &plain(3)), Err(CorpusError::EmptyCorpus)));
        assert!(matches!(
            ingest(b"ok\xff", &plain(3)),
            Err(CorpusError::NotUtf8 { offset: 2 })
        ));
        assert!(matches!(ingest(b"x", &plain(0)), Err(CorpusError::InvalidConfig(_))));
        let no_col = AdapterConfig::new(Format::Csv, Some(Label::Ai), "c");
        assert!(matches!(ingest(b"x\n1", &no_col), Err(CorpusError::InvalidConfig(_))));
    }

    #[test]
    fn config_from_toml() {
        let cfg = AdapterConfig::from_toml(
            "format = \"csv\"\ntext_column = \"line\"\ngroup_column = \"scene\"\nlabel = \"human\"\nsource = \"friends\"\n",
        )
        .unwrap();
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.window_lines, DEFAULT_WINDOW_LINES);
        assert!(AdapterConfig::from_toml("format = \"csv\"\nsource = \"x\"\nlabel = \"ai\"\n").is_err());
        let unlabeled = AdapterConfig::from_toml("format = \"plaintext\"\nsource = \"x\"\n").unwrap();
        assert!(unlabeled.validate().is_err());
        assert!(AdapterConfig::from_toml("format = \"xml\"\nsource = \"x\"\n").is_err());
    }

    #[test]
    fn jsonl_writer_round_trips() {
        let mut r = DialogueRecord::new("g-000000", Label::Ai, "g", "line one\nline \"two\"");
        r.meta.insert("model".into(), "stub".into());
        let text = to_jsonl(&[r.clone()]);
        let back = ingest(text.as_bytes(), &AdapterConfig::new(Format::Jsonl, None, "g")).unwrap();
        assert_eq!(back, vec![r]);
    }
}
