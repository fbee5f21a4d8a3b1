//! Word segmentation for lexicon matching.
//!
//! A token is a maximal run of Unicode letters and digits, lowercased. One
//! apostrophe may sit inside a run when it is flanked by word characters on
//! both sides, so `don't` stays a single token while `'quoted'` does not keep
//! its quotes. Everything else (punctuation, hyphens, dashes, symbols,
//! whitespace) separates tokens.

use alloc::string::String;
use alloc::vec::Vec;

/// Tokens of one text, in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    /// Number of `char`s in the source text.
    pub source_char_count: usize,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSequence {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let tokens: Vec<String> = iter.into_iter().map(Into::into).collect();
        let source_char_count =
            tokens.iter().map(|t| t.chars().count()).sum::<usize>() + tokens.len().saturating_sub(1);
        TokenSequence {
            tokens,
            source_char_count,
        }
    }
}

#[inline]
pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

// ASCII apostrophe and the typographic right single quote used by most
// editors and chat models.
#[inline]
pub(crate) fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn push_lower(buf: &mut String, c: char) {
    // Some lowercase mappings emit combining marks (U+0130 -> "i\u{307}");
    // those are dropped so a token only ever holds word characters.
    buf.extend(c.to_lowercase().filter(|&l| is_word_char(l)));
}

/// Split `text` into lowercase word tokens.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut has_apostrophe = false;
    let mut source_char_count = 0usize;
    let mut chars = text.chars().peekable();

    while let Some(c) = chars.next() {
        source_char_count += 1;
        if is_word_char(c) {
            push_lower(&mut current, c);
            continue;
        }
        let internal = is_apostrophe(c)
            && !current.is_empty()
            && !has_apostrophe
            && chars.peek().is_some_and(|&n| is_word_char(n));
        if internal {
            current.push('\'');
            has_apostrophe = true;
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
            has_apostrophe = false;
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }

    TokenSequence {
        tokens,
        source_char_count,
    }
}
