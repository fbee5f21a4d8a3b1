//! Lexicon matching and category intensities.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::lexicon::Lexicon;
use crate::tokenizer::TokenSequence;

/// Denominator used to turn raw category counts into intensities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub enum Normalization {
    /// Divide by the number of token positions that matched at least one
    /// category.
    #[default]
    ByMatched,
    /// Divide by the total number of tokens (Empath's own `normalize=True`).
    ByTotalTokens,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::ByMatched => "by-matched",
            Normalization::ByTotalTokens => "by-total-tokens",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown normalization mode {0:?} (expected by-matched or by-total-tokens)")]
pub struct UnknownNormalization(pub String);

impl FromStr for Normalization {
    type Err = UnknownNormalization;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "by-matched" => Ok(Normalization::ByMatched),
            "by-total-tokens" => Ok(Normalization::ByTotalTokens),
            other => Err(UnknownNormalization(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScore {
    pub name: String,
    pub raw_count: u64,
    pub intensity: f64,
}

/// Per-text category counts and intensities, in lexicon category order.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryProfile {
    pub scores: Vec<CategoryScore>,
    /// Token positions that matched at least one category.
    pub matched_occurrences: u64,
    pub total_tokens: u64,
    pub normalization: Normalization,
}

impl CategoryProfile {
    /// A profile built directly from intensity values, with no underlying
    /// token counts. `matched_occurrences` is 1 when any intensity is
    /// positive and 0 otherwise, so the metrics treat it like an analyzed
    /// text with or without matches.
    pub fn from_intensities<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        let scores: Vec<CategoryScore> = pairs
            .into_iter()
            .map(|(name, intensity)| CategoryScore {
                name: name.into(),
                raw_count: 0,
                intensity,
            })
            .collect();
        let any = u64::from(scores.iter().any(|s| s.intensity > 0.0));
        CategoryProfile {
            scores,
            matched_occurrences: any,
            total_tokens: any,
            normalization: Normalization::ByMatched,
        }
    }

    pub fn get(&self, category: &str) -> Option<&CategoryScore> {
        self.scores.iter().find(|s| s.name == category)
    }

    pub fn raw_count(&self, category: &str) -> Option<u64> {
        self.get(category).map(|s| s.raw_count)
    }

    pub fn intensity(&self, category: &str) -> Option<f64> {
        self.get(category).map(|s| s.intensity)
    }

    pub fn intensity_sum(&self) -> f64 {
        self.scores.iter().map(|s| s.intensity).sum()
    }

    /// Copy with every intensity multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.scores {
            s.intensity *= k;
        }
        out
    }
}

/// Score `tokens` against `lexicon` with the matched-occurrence denominator.
pub fn analyze(tokens: &TokenSequence, lexicon: &Lexicon) -> CategoryProfile {
    analyze_with(tokens, lexicon, Normalization::ByMatched)
}

/// Score `tokens` against `lexicon`.
///
/// At each position `i`, every window `tokens[i..i+n]` (n up to the longest
/// term) is joined with `_` and looked up. A category is counted at most once
/// per starting position, even if several of its terms start there
/// (`ice` and `ice_cream`). A position counts towards `matched_occurrences`
/// once, however many categories it hits.
pub fn analyze_with(tokens: &TokenSequence, lexicon: &Lexicon, normalization: Normalization) -> CategoryProfile {
    let toks = &tokens.tokens;
    let mut counts = vec![0u64; lexicon.len()];
    let mut last_hit = vec![usize::MAX; lexicon.len()];
    let mut matched = 0u64;
    let mut key = String::new();

    for i in 0..toks.len() {
        let mut hit = false;
        key.clear();
        for (w, tok) in toks[i..].iter().take(lexicon.max_ngram()).enumerate() {
            if w > 0 {
                key.push('_');
            }
            key.push_str(tok);
            for &c in lexicon.categories_for(&key) {
                hit = true;
                if last_hit[c] != i {
                    last_hit[c] = i;
                    counts[c] += 1;
                }
            }
        }
        if hit {
            matched += 1;
        }
    }

    let total = toks.len() as u64;
    let denom = match normalization {
        Normalization::ByMatched => matched,
        Normalization::ByTotalTokens => total,
    };
    let scores = lexicon
        .categories()
        .iter()
        .zip(counts)
        .map(|(cat, raw_count)| CategoryScore {
            name: cat.name.clone(),
            raw_count,
            intensity: if denom == 0 {
                0.0
            } else {
                raw_count as f64 / denom as f64
            },
        })
        .collect();

    CategoryProfile {
        scores,
        matched_occurrences: matched,
        total_tokens: total,
        normalization,
    }
}
