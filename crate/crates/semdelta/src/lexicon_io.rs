//! Loading lexicons from disk.
//!
//! Two on-disk shapes are accepted: the native TSV (`category<TAB>term...`)
//! and a JSON object mapping category names to term arrays, which is how
//! Empath-style category dumps are usually distributed. The special path
//! `builtin:test` selects the bundled 16-category test lexicon.

use std::path::{Path, PathBuf};

use indexmap::IndexMap;

use semdelta_core::{builtin_test_lexicon, load_lexicon, Lexicon, LexiconError, LexiconFormat};

pub const BUILTIN_TEST: &str = "builtin:test";

#[derive(Debug, thiserror::Error)]
pub enum LexiconLoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: LexiconError,
    },
    #[error("{path}: line {line}: {reason}")]
    Json { path: PathBuf, line: usize, reason: String },
}

/// Read a lexicon file. The name is the file stem; the format is JSON for a
/// `.json` extension and TSV otherwise.
pub fn load_lexicon_file(path: &Path) -> Result<Lexicon, LexiconLoadError> {
    if path.as_os_str() == BUILTIN_TEST {
        return Ok(builtin_test_lexicon());
    }
    let bytes = std::fs::read(path).map_err(|source| LexiconLoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("lexicon");
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        lexicon_from_json(name, &bytes).map_err(|e| match e {
            JsonLexiconError::Parse { line, reason } => LexiconLoadError::Json {
                path: path.to_path_buf(),
                line,
                reason,
            },
            JsonLexiconError::Invalid(source) => LexiconLoadError::Invalid {
                path: path.to_path_buf(),
                source,
            },
        })
    } else {
        load_lexicon(name, &bytes, LexiconFormat::Tsv).map_err(|source| LexiconLoadError::Invalid {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug)]
pub enum JsonLexiconError {
    Parse { line: usize, reason: String },
    Invalid(LexiconError),
}

/// Build a lexicon from `{"category": ["term", ...], ...}`. Category order
/// follows the document.
pub fn lexicon_from_json(name: &str, bytes: &[u8]) -> Result<Lexicon, JsonLexiconError> {
    let map: IndexMap<String, Vec<String>> = serde_json::from_slice(bytes).map_err(|e| JsonLexiconError::Parse {
        line: e.line(),
        reason: e.to_string(),
    })?;
    Lexicon::from_categories(name, map).map_err(JsonLexiconError::Invalid)
}
