//! Category lexicon: named categories, each a set of lowercase terms.
//!
//! Terms are single words or n-grams of up to three words joined by `_`
//! (`ice_cream`, `new_york_city`). A term may belong to several categories.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::tokenizer::{is_apostrophe, is_word_char, tokenize};

/// Longest n-gram a term may spell.
pub const MAX_NGRAM: usize = 3;

const TEST_LEXICON_TSV: &str = include_str!("../data/test_lexicon.tsv");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("input is not valid UTF-8 (byte offset {offset})")]
    NotUtf8 { offset: usize },
    #[error("line {line}: expected a category name and TAB-separated terms")]
    MalformedLine { line: usize },
    #[error("line {line}: invalid category name {name:?}")]
    InvalidCategoryName { line: usize, name: String },
    #[error("line {line}: category {name:?} already defined on line {first_line}")]
    DuplicateCategory {
        line: usize,
        first_line: usize,
        name: String,
    },
    #[error("line {line}: category {name:?} has no terms")]
    EmptyCategory { line: usize, name: String },
    #[error("line {line}: invalid term {term:?}")]
    InvalidTerm { line: usize, term: String },
    #[error("lexicon defines no categories")]
    NoCategories,
}

/// Supported lexicon encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconFormat {
    /// `name<TAB>term<TAB>term...`, one category per line, `#` comments.
    Tsv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    /// Distinct terms in first-seen order.
    pub terms: Vec<String>,
}

/// Index from a term (underscore-joined for n-grams) to the categories
/// containing it, plus the longest n-gram length present.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct TermIndex {
    by_term: BTreeMap<String, Vec<usize>>,
    max_words: usize,
}

/// An immutable, validated category lexicon.
#[derive(Debug, Clone)]
pub struct Lexicon {
    name: String,
    categories: Vec<Category>,
    term_count: usize,
    index: TermIndex,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.categories == other.categories
    }
}

impl Eq for Lexicon {}

impl Lexicon {
    /// Build a lexicon from `(category, terms)` pairs, normalizing and
    /// validating every term. Line numbers in errors are 1-based positions
    /// in `categories`.
    pub fn from_categories<N, T, I>(name: &str, categories: I) -> Result<Self, LexiconError>
    where
        N: AsRef<str>,
        T: AsRef<str>,
        I: IntoIterator<Item = (N, Vec<T>)>,
    {
        let mut builder = Builder::default();
        for (i, (cat, terms)) in categories.into_iter().enumerate() {
            builder.add(i + 1, cat.as_ref(), terms.iter().map(AsRef::as_ref))?;
        }
        builder.finish(name)
    }

    /// The 16-category fixture bundled with the crate.
    pub fn builtin_test() -> Self {
        load_lexicon("test", TEST_LEXICON_TSV.as_bytes(), LexiconFormat::Tsv).expect("bundled test lexicon is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category_names(&self) -> impl Iterator<Item = &str> {
        self.categories.iter().map(|c| c.name.as_str())
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Total terms summed over categories (shared terms count once per category).
    pub fn term_count(&self) -> usize {
        self.term_count
    }

    /// Number of words in the longest term.
    pub fn max_ngram(&self) -> usize {
        self.index.max_words
    }

    /// Indices of categories containing `term` (underscore-joined for n-grams).
    pub fn categories_for(&self, term: &str) -> &[usize] {
        self.index.by_term.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Serialize in the TSV format read by [`load_lexicon`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for cat in &self.categories {
            out.push_str(&cat.name);
            for term in &cat.terms {
                out.push('\t');
                out.push_str(term);
            }
            out.push('\n');
        }
        out
    }

    /// One-line description: `"<n> categories, <m> terms, max n-gram <k>"`.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{} categories, {} terms, max n-gram {}",
            self.len(),
            self.term_count,
            self.max_ngram()
        );
        s
    }
}

/// Alias kept for call sites that read better as a free function.
pub fn builtin_test_lexicon() -> Lexicon {
    Lexicon::builtin_test()
}

/// Parse a lexicon from raw bytes.
pub fn load_lexicon(name: &str, source: &[u8], format: LexiconFormat) -> Result<Lexicon, LexiconError> {
    let text = core::str::from_utf8(source).map_err(|e| LexiconError::NotUtf8 {
        offset: e.valid_up_to(),
    })?;
    match format {
        LexiconFormat::Tsv => parse_tsv(name, text),
    }
}

fn parse_tsv(name: &str, text: &str) -> Result<Lexicon, LexiconError> {
    let mut builder = Builder::default();
    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let cat = fields.next().unwrap_or_default();
        let terms: Vec<&str> = fields.collect();
        if terms.is_empty() {
            return Err(LexiconError::MalformedLine { line: line_no });
        }
        builder.add(line_no, cat, terms.into_iter())?;
    }
    builder.finish(name)
}

#[derive(Default)]
struct Builder {
    categories: Vec<Category>,
    first_line: BTreeMap<String, usize>,
}

impl Builder {
    fn add<'a>(&mut self, line: usize, cat: &str, terms: impl Iterator<Item = &'a str>) -> Result<(), LexiconError> {
        let cat_name = cat.trim();
        if cat_name.is_empty() || cat_name.chars().any(char::is_whitespace) {
            return Err(LexiconError::InvalidCategoryName {
                line,
                name: cat.to_string(),
            });
        }
        if let Some(&first_line) = self.first_line.get(cat_name) {
            return Err(LexiconError::DuplicateCategory {
                line,
                first_line,
                name: cat_name.to_string(),
            });
        }

        let raw: Vec<&str> = terms.collect();
        // a trailing TAB leaves empty fields at the end of the line; tolerate those
        let keep = raw.iter().rposition(|t| !t.trim().is_empty()).map_or(0, |p| p + 1);
        let mut normalized: Vec<String> = Vec::with_capacity(keep);
        for &term in &raw[..keep] {
            let term = normalize_term(term).ok_or_else(|| LexiconError::InvalidTerm {
                line,
                term: term.to_string(),
            })?;
            if !normalized.contains(&term) {
                normalized.push(term);
            }
        }
        if normalized.is_empty() {
            return Err(LexiconError::EmptyCategory {
                line,
                name: cat_name.to_string(),
            });
        }

        self.first_line.insert(cat_name.to_string(), line);
        self.categories.push(Category {
            name: cat_name.to_string(),
            terms: normalized,
        });
        Ok(())
    }

    fn finish(self, name: &str) -> Result<Lexicon, LexiconError> {
        if self.categories.is_empty() {
            return Err(LexiconError::NoCategories);
        }
        let mut index = TermIndex::default();
        let mut term_count = 0;
        for (ci, cat) in self.categories.iter().enumerate() {
            term_count += cat.terms.len();
            for term in &cat.terms {
                let words = term.split('_').count();
                index.max_words = index.max_words.max(words);
                index.by_term.entry(term.clone()).or_default().push(ci);
            }
        }
        Ok(Lexicon {
            name: name.to_string(),
            categories: self.categories,
            term_count,
            index,
        })
    }
}

/// Lowercase and validate a term. Each underscore-separated part must be
/// exactly one token under the tokenizer's rules, so every accepted term can
/// actually be matched.
pub(crate) fn normalize_term(raw: &str) -> Option<String> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return None;
    }
    let parts: Vec<&str> = trimmed.split('_').collect();
    if parts.len() > MAX_NGRAM {
        return None;
    }
    let mut out = String::with_capacity(trimmed.len());
    for (i, part) in parts.iter().enumerate() {
        // an empty part means a leading, trailing or doubled underscore
        if part.is_empty() {
            return None;
        }
        let word = normalize_word(part)?;
        if i > 0 {
            out.push('_');
        }
        out.push_str(&word);
    }
    Some(out)
}

fn normalize_word(part: &str) -> Option<String> {
    if !part.chars().all(|c| is_word_char(c) || is_apostrophe(c)) {
        return None;
    }
    let apostrophes = part.chars().filter(|&c| is_apostrophe(c)).count();
    match tokenize(part).tokens.as_slice() {
        [word] if word.matches('\'').count() == apostrophes => Some(word.clone()),
        _ => None,
    }
}
